use std::collections::{BTreeSet, VecDeque};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::graph::{tree_path, MetricGraphMap};
use crate::tree::pseudo_metric::{SurrogateCache, UnionFind};

/// Above this many classes the arc metric is evaluated on demand instead of
/// being tabulated.
pub const TABLE_CLASS_LIMIT: usize = 500;

/// The quotient of a metric graph map by ε-level-set components, when it is a
/// tree.
#[derive(Debug)]
pub struct QuotientTree {
    map: MetricGraphMap,
    epsilon: f64,
    classes: Vec<Vec<usize>>,
    psi: Vec<usize>,
    /// Lowest-id vertex of each class; φ̄ is read off here.
    reps: Vec<usize>,
    parent: Vec<Option<usize>>,
    adjacency: Vec<Vec<usize>>,
    table: Option<Vec<f64>>,
    cache: Mutex<SurrogateCache>,
}

/// Serializable summary of a [`QuotientTree`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientTreeDocument {
    pub epsilon: f64,
    /// Vertex ids per class.
    pub classes: Vec<Vec<u64>>,
    /// `(parent, child)` class pairs, rooted at class 0.
    pub arcs: Vec<(usize, usize)>,
    /// Class of each vertex, in the order of the input vertex list.
    pub psi: Vec<usize>,
    pub phi_bar: Vec<Vec<f64>>,
    /// Row-major arc metric, present for trees with at most
    /// [`TABLE_CLASS_LIMIT`] classes.
    pub d_t: Option<Vec<Vec<f64>>>,
}

/// Greedy ε-components: each unassigned vertex (in id order) seeds the
/// component of `{v : |φ(v) - φ(seed)| ≤ ε}` containing it.
fn level_classes(map: &MetricGraphMap, epsilon: f64) -> (Vec<Vec<usize>>, Vec<usize>) {
    let n = map.len();
    let mut by_id: Vec<usize> = (0..n).collect();
    by_id.sort_by_key(|&v| map.ids()[v]);
    let mut psi = vec![usize::MAX; n];
    let mut classes = Vec::new();
    for &seed in &by_id {
        if psi[seed] != usize::MAX {
            continue;
        }
        let k = classes.len();
        let mut members = vec![seed];
        psi[seed] = k;
        let mut queue = VecDeque::from([seed]);
        while let Some(v) = queue.pop_front() {
            for w in map.neighbors(v) {
                if psi[w] == usize::MAX && map.target_distance(seed, w) <= epsilon {
                    psi[w] = k;
                    members.push(w);
                    queue.push_back(w);
                }
            }
        }
        members.sort_by_key(|&v| map.ids()[v]);
        classes.push(members);
    }
    (classes, psi)
}

pub fn build_quotient_tree(map: &MetricGraphMap, epsilon: f64) -> Result<QuotientTree> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("epsilon must be non-negative, got {epsilon}")));
    }
    let (classes, psi) = level_classes(map, epsilon);
    let k = classes.len();

    // Contract, dropping edges inside a class and repeated class pairs.
    let mut arcs = BTreeSet::new();
    for &(a, b, _) in map.edges() {
        let (p, q) = (psi[a], psi[b]);
        if p != q {
            arcs.insert((p.min(q), p.max(q)));
        }
    }
    let mut uf = UnionFind::new(k);
    let mut adjacency = vec![Vec::new(); k];
    for &(p, q) in &arcs {
        if !uf.union(p, q) {
            let parent = bfs_parents(&adjacency, p);
            let mut cycle = tree_path(&parent, q, p);
            cycle.push(q);
            return Err(Error::NotATree { cycle });
        }
        adjacency[p].push(q);
        adjacency[q].push(p);
    }
    let parent = bfs_parents(&adjacency, 0);
    let reps = classes.iter().map(|c| c[0]).collect();

    let mut tree = QuotientTree {
        map: map.clone(),
        epsilon,
        classes,
        psi,
        reps,
        parent,
        adjacency,
        table: None,
        cache: Mutex::new(SurrogateCache::default()),
    };
    if k <= TABLE_CLASS_LIMIT {
        tree.table = Some(tree.tabulate());
    }
    Ok(tree)
}

fn bfs_parents(adjacency: &[Vec<usize>], root: usize) -> Vec<Option<usize>> {
    let mut parent = vec![None; adjacency.len()];
    let mut seen = vec![false; adjacency.len()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(v);
                queue.push_back(w);
            }
        }
    }
    parent
}

impl QuotientTree {
    pub fn map(&self) -> &MetricGraphMap {
        &self.map
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Vertex indices in class `c`, sorted by id.
    pub fn class(&self, c: usize) -> &[usize] {
        &self.classes[c]
    }

    /// ψ: class of vertex index `v`.
    pub fn psi(&self, v: usize) -> usize {
        self.psi[v]
    }

    /// φ̄: image of class `c`.
    pub fn phi_bar(&self, c: usize) -> &[f64] {
        self.map.phi(self.reps[c])
    }

    pub fn representative(&self, c: usize) -> usize {
        self.reps[c]
    }

    pub fn neighbors(&self, c: usize) -> &[usize] {
        &self.adjacency[c]
    }

    /// `(parent, child)` pairs.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (p, c)))
            .collect()
    }

    /// Classes along the arc from `p` to `q`, both included.
    pub fn arc(&self, p: usize, q: usize) -> Vec<usize> {
        tree_path(&self.parent, p, q)
    }

    /// Surrogate D between class representatives.
    pub fn class_distance(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return 0.0;
        }
        let (x, y) = (self.reps[a], self.reps[b]);
        let mut cache = self.cache.lock().expect("cache lock");
        cache.get(&self.map, x, y)
    }

    /// d_T(p, q) = max { D(a, b) : [a, b] ⊆ [p, q] }.
    pub fn d_t(&self, p: usize, q: usize) -> f64 {
        if let Some(table) = &self.table {
            return table[p * self.classes.len() + q];
        }
        let path = self.arc(p, q);
        let mut best = 0.0f64;
        for i in 0..path.len() {
            for j in i + 1..path.len() {
                best = best.max(self.class_distance(path[i], path[j]));
            }
        }
        best
    }

    /// Fills the d_T table by increasing arc length, using
    /// d_T(a, b) = max(D(a, b), d_T(a', b), d_T(a, b')) with a', b' the inner
    /// neighbours of the endpoints.
    fn tabulate(&self) -> Vec<f64> {
        let k = self.classes.len();
        // next[a * k + b]: neighbour of a on the arc toward b.
        let mut next = vec![usize::MAX; k * k];
        let mut hops = vec![0usize; k * k];
        for b in 0..k {
            let parents = bfs_parents(&self.adjacency, b);
            for a in 0..k {
                if let Some(p) = parents[a] {
                    next[a * k + b] = p;
                }
            }
            for a in 0..k {
                let mut h = 0;
                let mut v = a;
                while v != b {
                    v = next[v * k + b];
                    h += 1;
                }
                hops[a * k + b] = h;
            }
        }
        let mut pairs: Vec<(usize, usize)> = (0..k)
            .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
            .collect();
        pairs.sort_by_key(|&(a, b)| hops[a * k + b]);
        let mut table = vec![0.0; k * k];
        for (a, b) in pairs {
            let mut v = self.class_distance(a, b);
            if hops[a * k + b] > 1 {
                let inner_a = next[a * k + b];
                let inner_b = next[b * k + a];
                v = v.max(table[inner_a * k + b]).max(table[a * k + inner_b]);
            }
            table[a * k + b] = v;
            table[b * k + a] = v;
        }
        table
    }

    pub fn to_document(&self) -> QuotientTreeDocument {
        let k = self.classes.len();
        QuotientTreeDocument {
            epsilon: self.epsilon,
            classes: self
                .classes
                .iter()
                .map(|c| c.iter().map(|&v| self.map.ids()[v]).collect())
                .collect(),
            arcs: self.arcs(),
            psi: self.psi.clone(),
            phi_bar: (0..k).map(|c| self.phi_bar(c).to_vec()).collect(),
            d_t: self
                .table
                .as_ref()
                .map(|t| t.chunks(k).map(<[f64]>::to_vec).collect()),
        }
    }
}
