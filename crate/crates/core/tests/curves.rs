use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use treefactor::fixtures;
use treefactor::formats::{read_curve_csv, write_curve_csv};
use treefactor::{loop_erase, reparameterize_by_variation, sigma_variation, Modulus};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn erasure_is_idempotent_and_keeps_endpoints(seed in 0u64..10_000, n in 6usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let curve = fixtures::polygon_with_repeats(n, n / 3, &mut rng).unwrap();
        let once = loop_erase(&curve, 0.0);
        let twice = loop_erase(&once, 0.0);
        prop_assert_eq!(once.coords(), twice.coords());
        prop_assert_eq!(once.point(0), curve.point(0));
        prop_assert_eq!(once.point(once.len() - 1), curve.point(curve.len() - 1));
        prop_assert!(once.is_closed());
    }

    #[test]
    fn reparameterized_time_is_the_variation(seed in 0u64..10_000, n in 6usize..40, exponent in 0.3f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let curve = loop_erase(&fixtures::polygon_with_repeats(n, 2, &mut rng).unwrap(), 0.0);
        let sigma = Modulus::power(1.0, exponent).unwrap();
        let total = sigma_variation(&curve, &sigma).unwrap();
        let out = reparameterize_by_variation(&curve, &sigma).unwrap();
        prop_assert_eq!(out.times()[0], 0.0);
        prop_assert!((out.times()[out.len() - 1] - total).abs() <= 1e-12 * total);
        prop_assert!(out.times().windows(2).all(|w| w[0] < w[1]));
        let again = sigma_variation(&out, &sigma).unwrap();
        prop_assert!((again - total).abs() <= 1e-9 * total);
    }

    #[test]
    fn csv_round_trip_is_bitwise(seed in 0u64..10_000, n in 4usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let curve = fixtures::polygon_with_repeats(n, 1, &mut rng).unwrap();
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &curve).unwrap();
        let back = read_curve_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back, curve);
    }
}
