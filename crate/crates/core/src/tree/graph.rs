use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::curve::euclidean;
use crate::error::{Error, Result};

/// JSON shape of a [`MetricGraphMap`]: edges refer to vertex ids, `phi[k]` is
/// the image of `vertices[k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: Vec<u64>,
    pub edges: Vec<(u64, u64, f64)>,
    pub phi: Vec<Vec<f64>>,
    #[serde(rename = "C", default = "one")]
    pub quasi_convexity: f64,
}

fn one() -> f64 {
    1.0
}

/// A connected weighted graph with a point of R^d attached to every vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricGraphMap {
    ids: Vec<u64>,
    edges: Vec<(usize, usize, f64)>,
    adjacency: Vec<Vec<(usize, f64)>>,
    phi: Vec<Vec<f64>>,
    dim: usize,
    quasi_convexity: f64,
}

impl MetricGraphMap {
    /// Builds a map from index-based edges; vertex ids are `0..phi.len()`.
    pub fn from_indices(edges: Vec<(usize, usize, f64)>, phi: Vec<Vec<f64>>) -> Result<Self> {
        let ids = (0..phi.len() as u64).collect();
        Self::build(ids, edges, phi, 1.0)
    }

    pub fn from_document(doc: GraphDocument) -> Result<Self> {
        let mut index = HashMap::with_capacity(doc.vertices.len());
        for (k, &id) in doc.vertices.iter().enumerate() {
            if index.insert(id, k).is_some() {
                return Err(Error::invalid(format!("duplicate vertex id {id}")));
            }
        }
        let lookup = |id: u64| {
            index
                .get(&id)
                .copied()
                .ok_or_else(|| Error::invalid(format!("edge refers to unknown vertex {id}")))
        };
        let edges = doc
            .edges
            .iter()
            .map(|&(a, b, len)| Ok((lookup(a)?, lookup(b)?, len)))
            .collect::<Result<Vec<_>>>()?;
        Self::build(doc.vertices, edges, doc.phi, doc.quasi_convexity)
    }

    fn build(
        ids: Vec<u64>,
        edges: Vec<(usize, usize, f64)>,
        phi: Vec<Vec<f64>>,
        quasi_convexity: f64,
    ) -> Result<Self> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::invalid("graph has no vertices"));
        }
        if phi.len() != n {
            return Err(Error::invalid(format!(
                "{} vertices but {} phi values",
                n,
                phi.len()
            )));
        }
        let dim = phi[0].len();
        if dim == 0 || phi.iter().any(|p| p.len() != dim) {
            return Err(Error::invalid("phi values must share a positive dimension"));
        }
        if phi.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite phi value"));
        }
        if !(quasi_convexity >= 1.0 && quasi_convexity.is_finite()) {
            return Err(Error::invalid(format!(
                "quasi-convexity constant must be at least 1, got {quasi_convexity}"
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b, len) in &edges {
            if a >= n || b >= n {
                return Err(Error::invalid(format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop at vertex {}", ids[a])));
            }
            if !(len > 0.0 && len.is_finite()) {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) has non-positive length {len}",
                    ids[a], ids[b]
                )));
            }
            adjacency[a].push((b, len));
            adjacency[b].push((a, len));
        }
        let map = MetricGraphMap {
            ids,
            edges,
            adjacency,
            phi,
            dim,
            quasi_convexity,
        };
        if map.bfs_order(0).len() != n {
            return Err(Error::invalid("graph is not connected"));
        }
        Ok(map)
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            vertices: self.ids.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b, len)| (self.ids[a], self.ids[b], len))
                .collect(),
            phi: self.phi.clone(),
            quasi_convexity: self.quasi_convexity,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.ids.iter().position(|&v| v == id)
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().map(|&(w, _)| w)
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].iter().any(|&(w, _)| w == b)
    }

    pub fn phi(&self, v: usize) -> &[f64] {
        &self.phi[v]
    }

    pub fn quasi_convexity(&self) -> f64 {
        self.quasi_convexity
    }

    /// Target distance |φ(a) - φ(b)|.
    pub fn target_distance(&self, a: usize, b: usize) -> f64 {
        euclidean(&self.phi[a], &self.phi[b])
    }

    fn bfs_order(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut order = vec![start];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
        order
    }

    /// BFS spanning tree from vertex 0: `parent[v]` and the edges left out.
    pub(crate) fn spanning_tree(&self) -> (Vec<Option<usize>>, Vec<(usize, usize)>) {
        let n = self.len();
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut used = vec![false; self.edges.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (k, &(a, b, _)) in self.edges.iter().enumerate() {
            incident[a].push((b, k));
            incident[b].push((a, k));
        }
        while let Some(v) = queue.pop_front() {
            for &(w, k) in &incident[v] {
                if !seen[w] {
                    seen[w] = true;
                    used[k] = true;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        let chords = self
            .edges
            .iter()
            .zip(&used)
            .filter(|(_, u)| !**u)
            .map(|(&(a, b, _), _)| (a, b))
            .collect();
        (parent, chords)
    }
}

/// Vertex path between `a` and `b` in a rooted forest given by parent links.
pub(crate) fn tree_path(parent: &[Option<usize>], a: usize, b: usize) -> Vec<usize> {
    let ancestors = |mut v: usize| {
        let mut chain = vec![v];
        while let Some(p) = parent[v] {
            chain.push(p);
            v = p;
        }
        chain
    };
    let up_a = ancestors(a);
    let up_b = ancestors(b);
    let pos_in_a: HashMap<usize, usize> = up_a.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let (j, ia) = up_b
        .iter()
        .enumerate()
        .find_map(|(j, v)| pos_in_a.get(v).map(|&i| (j, i)))
        .expect("vertices share a root");
    let mut path: Vec<usize> = up_a[..=ia].to_vec();
    path.extend(up_b[..j].iter().rev());
    path
}
