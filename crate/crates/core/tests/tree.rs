use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use treefactor::fixtures;
use treefactor::{
    build_quotient_tree, pseudo_metric_d_exact, pseudo_metric_d_surrogate, ConeExtension, Error,
    Modulus,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn tree_metric_dominates_and_is_monotone(seed in 0u64..10_000, nodes in 2usize..15) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map = fixtures::tree_factorable_graph(nodes, &mut rng).unwrap();
        let tree = build_quotient_tree(&map, 0.0).unwrap();
        let k = tree.class_count();
        for p in 0..k {
            prop_assert_eq!(tree.d_t(p, p), 0.0);
            for q in 0..k {
                let d = tree.d_t(p, q);
                prop_assert_eq!(d, tree.d_t(q, p));
                prop_assert!(d >= tree.class_distance(p, q));
                let arc = tree.arc(p, q);
                prop_assert_eq!(arc[0], p);
                prop_assert_eq!(arc[arc.len() - 1], q);
                for w in arc.windows(2) {
                    prop_assert!(tree.neighbors(w[0]).contains(&w[1]));
                }
                for (i, &a) in arc.iter().enumerate() {
                    for &b in &arc[i..] {
                        prop_assert!(tree.d_t(a, b) <= d);
                    }
                }
            }
        }
    }

    #[test]
    fn classes_partition_the_vertices(seed in 0u64..10_000, nodes in 2usize..15, eps in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map = fixtures::tree_factorable_graph(nodes, &mut rng).unwrap();
        match build_quotient_tree(&map, eps) {
            Ok(tree) => {
                let mut seen = vec![false; map.len()];
                for c in 0..tree.class_count() {
                    for &v in tree.class(c) {
                        prop_assert!(!seen[v]);
                        seen[v] = true;
                        prop_assert_eq!(tree.psi(v), c);
                    }
                    prop_assert_eq!(tree.representative(c), tree.class(c)[0]);
                }
                prop_assert!(seen.iter().all(|&s| s));
            }
            Err(Error::NotATree { cycle }) => {
                prop_assert!(cycle.len() >= 3);
                prop_assert_eq!(cycle.first(), cycle.last());
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn exact_metric_brackets_surrogate(seed in 0u64..10_000, n in 2usize..10, extra in 0usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map = fixtures::random_connected_graph(n, extra, &mut rng).unwrap();
        for x in 0..n {
            for y in 0..n {
                let d = pseudo_metric_d_exact(&map, x, y).unwrap();
                let s = pseudo_metric_d_surrogate(&map, x, y).unwrap();
                prop_assert!(map.target_distance(x, y) <= d);
                prop_assert!(d <= s && s <= 2.0 * d, "D = {d}, surrogate = {s}");
            }
        }
    }
}

#[test]
fn star_is_its_own_quotient() {
    let map = fixtures::star_graph(6).unwrap();
    let tree = build_quotient_tree(&map, 0.0).unwrap();
    assert_eq!(tree.class_count(), 7);
    assert_eq!(tree.neighbors(tree.psi(0)).len(), 6);
    assert_eq!(tree.arcs().len(), 6);
}

#[test]
fn cone_extension_hits_apex_and_boundary() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let map = fixtures::tree_factorable_graph(8, &mut rng).unwrap();
    let tree = build_quotient_tree(&map, 0.0).unwrap();
    let boundary: Vec<usize> = (0..tree.class_count()).chain((0..tree.class_count()).rev()).collect();
    let n = boundary.len();
    let cone = ConeExtension::new(&tree, boundary, 1e3, Modulus::identity()).unwrap();
    assert_eq!(cone.eval([0.0, 0.0]).unwrap(), cone.apex());
    assert_eq!(cone.eval([0.1, -0.2]).unwrap(), cone.apex());
    for k in 0..n {
        let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        assert_eq!(cone.eval([a.cos(), a.sin()]).unwrap(), cone.boundary(k));
    }
    assert!(cone.eval([1.5, 0.0]).is_err());
}
