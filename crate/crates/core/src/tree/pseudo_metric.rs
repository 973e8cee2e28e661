//! D(x, y) = min { diam φ(C) : C connected, x, y ∈ C }.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::tree::graph::MetricGraphMap;

/// Largest graph for which [`pseudo_metric_d_exact`] enumerates subsets.
pub const EXACT_VERTEX_LIMIT: usize = 22;

/// Exact D by branch and bound over connected vertex sets grown from `x`.
pub fn pseudo_metric_d_exact(map: &MetricGraphMap, x: usize, y: usize) -> Result<f64> {
    let n = map.len();
    if n > EXACT_VERTEX_LIMIT {
        return Err(Error::SizeLimit {
            vertices: n,
            limit: EXACT_VERTEX_LIMIT,
        });
    }
    check_vertex(map, x)?;
    check_vertex(map, y)?;
    if x == y {
        return Ok(0.0);
    }
    let mut dist = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            dist[a * n + b] = map.target_distance(a, b);
        }
    }
    let neighbors: Vec<u32> = (0..n)
        .map(|v| map.neighbors(v).fold(0u32, |m, w| m | (1 << w)))
        .collect();
    let mut search = Search {
        n,
        dist: &dist,
        neighbors: &neighbors,
        target: y,
        best: f64::INFINITY,
    };
    let members = 1u32 << x;
    search.grow(members, neighbors[x] & !members, 0, 0.0);
    Ok(search.best)
}

struct Search<'a> {
    n: usize,
    dist: &'a [f64],
    neighbors: &'a [u32],
    target: usize,
    best: f64,
}

impl Search<'_> {
    /// Every connected superset of `members` avoiding `excluded` is reached
    /// exactly once by branching on one frontier vertex at a time.
    fn grow(&mut self, members: u32, frontier: u32, excluded: u32, diam: f64) {
        if diam >= self.best {
            return;
        }
        if members & (1 << self.target) != 0 {
            self.best = diam;
            return;
        }
        let open = frontier & !excluded;
        if open == 0 {
            return;
        }
        // Branch on the frontier vertex that widens the image least.
        let mut pick = usize::MAX;
        let mut pick_diam = f64::INFINITY;
        for v in (0..self.n).filter(|v| open & (1 << v) != 0) {
            let widened = self.widen(members, v, diam);
            if widened < pick_diam {
                pick_diam = widened;
                pick = v;
            }
        }
        let bit = 1u32 << pick;
        let with = members | bit;
        self.grow(with, (frontier | self.neighbors[pick]) & !with, excluded, pick_diam);
        self.grow(members, frontier, excluded | bit, diam);
    }

    fn widen(&self, members: u32, v: usize, diam: f64) -> f64 {
        (0..self.n)
            .filter(|u| members & (1 << u) != 0)
            .map(|u| self.dist[u * self.n + v])
            .fold(diam, f64::max)
    }
}

fn check_vertex(map: &MetricGraphMap, v: usize) -> Result<()> {
    if v >= map.len() {
        return Err(Error::invalid(format!("vertex index {v} out of range")));
    }
    Ok(())
}

/// Ball relaxation of D: the smallest radius `t` around φ(x) at which x and y
/// share a component of the induced subgraph, reported as the image diameter
/// of that component. Symmetrized by taking the smaller of the two directions,
/// so the value lies in [D, 2D].
pub fn pseudo_metric_d_surrogate(map: &MetricGraphMap, x: usize, y: usize) -> Result<f64> {
    check_vertex(map, x)?;
    check_vertex(map, y)?;
    if x == y {
        return Ok(0.0);
    }
    Ok(ball_component_diameter(map, x, y).min(ball_component_diameter(map, y, x)))
}

fn ball_component_diameter(map: &MetricGraphMap, x: usize, y: usize) -> f64 {
    let n = map.len();
    let radius: Vec<f64> = (0..n).map(|v| map.target_distance(x, v)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| radius[a].total_cmp(&radius[b]).then(a.cmp(&b)));
    let mut uf = UnionFind::new(n);
    let mut inside = vec![false; n];
    let mut k = 0;
    while k < n {
        // Admit every vertex at the next radius before testing connectivity.
        let r = radius[order[k]];
        while k < n && radius[order[k]] == r {
            let v = order[k];
            inside[v] = true;
            for w in map.neighbors(v) {
                if inside[w] {
                    uf.union(v, w);
                }
            }
            k += 1;
        }
        if inside[y] && uf.find(x) == uf.find(y) {
            let root = uf.find(x);
            let comp: Vec<usize> = (0..n).filter(|&v| inside[v] && uf.find(v) == root).collect();
            let mut diam = 0.0f64;
            for (i, &a) in comp.iter().enumerate() {
                for &b in &comp[i + 1..] {
                    diam = diam.max(map.target_distance(a, b));
                }
            }
            return diam;
        }
    }
    unreachable!("connected graph joins every pair once all vertices are admitted")
}

/// Union-find with path halving; ties resolved toward the smaller index.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Memoized surrogate distances between vertex pairs of one map.
#[derive(Debug, Default)]
pub(crate) struct SurrogateCache {
    values: HashMap<(usize, usize), f64>,
}

impl SurrogateCache {
    pub(crate) fn get(&mut self, map: &MetricGraphMap, a: usize, b: usize) -> f64 {
        let key = (a.min(b), a.max(b));
        *self
            .values
            .entry(key)
            .or_insert_with(|| pseudo_metric_d_surrogate(map, key.0, key.1).expect("valid vertices"))
    }
}
