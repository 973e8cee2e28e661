//! Deterministic test geometry: curves, square fields and graphs.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::heisenberg::horizontal_lift;
use crate::surface::SquareField;
use crate::tree::MetricGraphMap;

/// Samples on the first circle are exact copies of the starting point at
/// whole turns, so closed curves close bitwise.
fn circle_points(center: [f64; 2], radius: f64, n: usize, turns: usize, dir: f64, phase: f64) -> Vec<[f64; 2]> {
    let start = [center[0] + radius * phase.cos(), center[1] + radius * phase.sin()];
    (0..=n * turns)
        .map(|k| {
            if k % n == 0 {
                start
            } else {
                let a = phase + dir * 2.0 * PI * k as f64 / n as f64;
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            }
        })
        .collect()
}

fn closed(points: &[[f64; 2]]) -> Result<SampledCurve> {
    let times = (0..points.len()).map(|k| k as f64 / (points.len() - 1) as f64).collect();
    SampledCurve::planar(times, points)
}

/// Counter-clockwise circle with `n` segments.
pub fn circle(center: [f64; 2], radius: f64, n: usize) -> Result<SampledCurve> {
    closed(&circle_points(center, radius, n, 1, 1.0, 0.0))
}

/// Counter-clockwise circle traversed twice.
pub fn double_circle(center: [f64; 2], radius: f64, n: usize) -> Result<SampledCurve> {
    closed(&circle_points(center, radius, n, 2, 1.0, 0.0))
}

/// Two unit lobes centred at (∓1, 0) meeting at the origin, `n` segments per
/// lobe. The left lobe runs counter-clockwise; the right lobe runs clockwise
/// unless `co_oriented`.
pub fn figure_eight(n: usize, co_oriented: bool) -> Result<SampledCurve> {
    let mut pts = circle_points([-1.0, 0.0], 1.0, n, 1, 1.0, 0.0);
    let right_dir = if co_oriented { 1.0 } else { -1.0 };
    let right = circle_points([1.0, 0.0], 1.0, n, 1, right_dir, PI);
    // Both lobes start at the origin; make it bitwise zero.
    pts[0] = [0.0, 0.0];
    pts[n] = [0.0, 0.0];
    pts.extend(right[1..n].iter().copied());
    pts.push([0.0, 0.0]);
    closed(&pts)
}

/// Lacunary series with shared random phases `c_k`, k = 0..=K:
/// (Σ 2^{-αk} sin(2^k s + c_k), Σ 2^{-αk} cos(2^k t + c_k)).
#[derive(Clone, Debug)]
pub struct Weierstrass {
    alpha: f64,
    phases: Vec<f64>,
}

impl Weierstrass {
    pub fn new(alpha: f64, top_term: usize, rng: &mut impl Rng) -> Self {
        Weierstrass {
            alpha,
            phases: (0..=top_term).map(|_| rng.gen_range(0.0..2.0 * PI)).collect(),
        }
    }

    fn series(&self, x: f64, wave: impl Fn(f64) -> f64) -> f64 {
        self.phases
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let freq = (1u64 << k) as f64;
                freq.powf(-self.alpha) * wave(freq * x + c)
            })
            .sum()
    }

    pub fn eval(&self, s: f64, t: f64) -> [f64; 2] {
        [self.series(s, f64::sin), self.series(t, f64::cos)]
    }
}

/// Side of the square carrying [`weierstrass_field`].
pub const WEIERSTRASS_SIDE: f64 = 2.0 * PI;

/// α-Hölder field on [0, 2π]² sampled at depth `depth` with top frequency
/// 2^(depth - 2) and phases drawn from `seed`.
pub fn weierstrass_field(alpha: f64, depth: usize, seed: u64) -> Result<SquareField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = Weierstrass::new(alpha, depth.saturating_sub(2), &mut rng);
    SquareField::from_fn([0.0, 0.0], WEIERSTRASS_SIDE, depth, |s, t| w.eval(s, t))
}

/// Smooth maps of the unit square with closed-form Jacobians.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmoothField {
    Identity,
    ComplexSquare,
    Rotation,
    Shear,
    Cubic,
}

impl SmoothField {
    pub const ALL: [SmoothField; 5] = [
        SmoothField::Identity,
        SmoothField::ComplexSquare,
        SmoothField::Rotation,
        SmoothField::Shear,
        SmoothField::Cubic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SmoothField::Identity => "identity",
            SmoothField::ComplexSquare => "complex-square",
            SmoothField::Rotation => "rotation",
            SmoothField::Shear => "shear",
            SmoothField::Cubic => "cubic",
        }
    }

    pub fn eval(&self, s: f64, t: f64) -> [f64; 2] {
        match self {
            SmoothField::Identity => [s, t],
            SmoothField::ComplexSquare => [s * s - t * t, 2.0 * s * t],
            SmoothField::Rotation => {
                let (sin, cos) = 0.7f64.sin_cos();
                [cos * s - sin * t, sin * s + cos * t]
            }
            SmoothField::Shear => [s + 0.8 * t, t],
            SmoothField::Cubic => [s + 0.3 * s * s * t - 0.2 * t * t * t, t + 0.25 * s * s * s + 0.1 * s * t],
        }
    }

    /// Rows are ∂φ₁ and ∂φ₂ with respect to (s, t).
    pub fn jacobian(&self, s: f64, t: f64) -> [[f64; 2]; 2] {
        match self {
            SmoothField::Identity => [[1.0, 0.0], [0.0, 1.0]],
            SmoothField::ComplexSquare => [[2.0 * s, -2.0 * t], [2.0 * t, 2.0 * s]],
            SmoothField::Rotation => {
                let (sin, cos) = 0.7f64.sin_cos();
                [[cos, -sin], [sin, cos]]
            }
            SmoothField::Shear => [[1.0, 0.8], [0.0, 1.0]],
            SmoothField::Cubic => [
                [1.0 + 0.6 * s * t, 0.3 * s * s - 0.6 * t * t],
                [0.75 * s * s + 0.1 * t, 1.0 + 0.1 * s],
            ],
        }
    }

    /// Samples on the unit square at the given depth.
    pub fn sample(&self, depth: usize) -> Result<SquareField> {
        SquareField::from_fn([0.0, 0.0], 1.0, depth, |s, t| self.eval(s, t))
    }
}

/// Planar circle of radius 1 about `center` raised to the Heisenberg group
/// from height 0.
pub fn lifted_circle(center: [f64; 2], n: usize) -> Result<SampledCurve> {
    horizontal_lift(&circle(center, 1.0, n)?, 0.0)
}

/// Cycle graph on the given planar points.
pub fn cycle_graph(points: &[[f64; 2]]) -> Result<MetricGraphMap> {
    let n = points.len();
    let edges = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
    MetricGraphMap::from_indices(edges, points.iter().map(|p| p.to_vec()).collect())
}

/// Star with `leaves` unit rays; the centre is vertex 0.
pub fn star_graph(leaves: usize) -> Result<MetricGraphMap> {
    let mut phi = vec![vec![0.0, 0.0]];
    for k in 0..leaves {
        let a = 2.0 * PI * k as f64 / leaves as f64;
        phi.push(vec![a.cos(), a.sin()]);
    }
    let edges = (1..=leaves).map(|k| (0, k, 1.0)).collect();
    MetricGraphMap::from_indices(edges, phi)
}

/// Star-shaped polygon with `n` vertices at sorted random angles and radii in
/// [0.5, 1.5): injective with positive enclosed area.
pub fn random_star_polygon(n: usize, rng: &mut impl Rng) -> Vec<[f64; 2]> {
    let mut angles: Vec<f64> = (0..n)
        .map(|k| 2.0 * PI * (k as f64 + rng.gen_range(0.1..0.9)) / n as f64)
        .collect();
    angles.sort_by(f64::total_cmp);
    angles
        .into_iter()
        .map(|a| {
            let r = rng.gen_range(0.5..1.5);
            [r * a.cos(), r * a.sin()]
        })
        .collect()
}

/// Random connected graph: a random spanning tree plus `extra` random chords,
/// with independent uniform planar images in [-1, 1]².
pub fn random_connected_graph(n: usize, extra: usize, rng: &mut impl Rng) -> Result<MetricGraphMap> {
    let mut edges: Vec<(usize, usize, f64)> = (1..n).map(|v| (rng.gen_range(0..v), v, 1.0)).collect();
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            edges.push((a, b, 1.0));
        }
    }
    let phi = (0..n)
        .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
        .collect();
    MetricGraphMap::from_indices(edges, phi)
}

/// A graph whose map factors through a random tree on `tree_nodes` nodes:
/// every node becomes a connected blob of 1..=3 graph vertices sharing the
/// node's planar image, and each tree edge is realized by one or two graph
/// edges between the blobs. Vertex ids are shuffled.
pub fn tree_factorable_graph(tree_nodes: usize, rng: &mut impl Rng) -> Result<MetricGraphMap> {
    let image: Vec<Vec<f64>> = (0..tree_nodes)
        .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
        .collect();
    let mut blobs: Vec<Vec<usize>> = Vec::with_capacity(tree_nodes);
    let mut phi = Vec::new();
    let mut edges = Vec::new();
    for node in image.iter() {
        let size = rng.gen_range(1..=3);
        let start = phi.len();
        for k in 0..size {
            phi.push(node.clone());
            if k > 0 {
                edges.push((start + rng.gen_range(0..k), start + k, 1.0));
            }
        }
        blobs.push((start..start + size).collect());
    }
    for v in 1..tree_nodes {
        let u = rng.gen_range(0..v);
        for _ in 0..rng.gen_range(1..=2) {
            let a = *blobs[u].choose(rng).expect("blob is non-empty");
            let b = *blobs[v].choose(rng).expect("blob is non-empty");
            edges.push((a, b, rng.gen_range(0.5..2.0)));
        }
    }
    let mut relabel: Vec<usize> = (0..phi.len()).collect();
    relabel.shuffle(rng);
    let edges = edges
        .into_iter()
        .map(|(a, b, len)| (relabel[a], relabel[b], len))
        .collect();
    let mut shuffled = vec![Vec::new(); phi.len()];
    for (old, p) in phi.into_iter().enumerate() {
        shuffled[relabel[old]] = p;
    }
    MetricGraphMap::from_indices(edges, shuffled)
}

/// Closed polygon of `n` random vertices in which `repeats` later samples are
/// exact copies of earlier ones. The start vertex is never copied.
pub fn polygon_with_repeats(n: usize, repeats: usize, rng: &mut impl Rng) -> Result<SampledCurve> {
    if n < 4 {
        return Err(Error::invalid(format!("planting repeats needs at least 4 vertices, got {n}")));
    }
    let mut pts: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
        .collect();
    for _ in 0..repeats {
        let j = rng.gen_range(3..n);
        let i = rng.gen_range(1..j - 1);
        pts[j] = pts[i];
    }
    let start = pts[0];
    pts.push(start);
    closed(&pts)
}
