//! Dyadic surface functionals ∫ f(x) deg(φ, Q, x) dx for planar maps sampled on
//! a `(2^N + 1)²` lattice, with optional second-order corrections.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::exact::ExactSum;
use crate::winding::{winding_field, WindingField};
use crate::young::{boundary_sum, left_product, GridFunction, GridSquare};

pub const MAX_DEPTH: usize = 14;

/// Number of diagonal values combined by [`ConvergenceReport::extrapolated`].
pub const EXTRAPOLATION_TERMS: usize = 5;

/// Samples of φ = (φ₁, φ₂) on the lattice `corner + side · (i, j) / 2^depth`.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareField {
    depth: usize,
    corner: [f64; 2],
    side: f64,
    phi1: GridFunction,
    phi2: GridFunction,
}

impl SquareField {
    pub fn new(
        corner: [f64; 2],
        side: f64,
        depth: usize,
        phi1: Vec<f64>,
        phi2: Vec<f64>,
    ) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::invalid(format!(
                "depth {depth} exceeds the maximum {MAX_DEPTH}"
            )));
        }
        if !(side > 0.0 && side.is_finite()) || !corner.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("square needs a finite corner and positive side"));
        }
        let n = (1usize << depth) + 1;
        if phi1.iter().chain(&phi2).any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite field value"));
        }
        Ok(SquareField {
            depth,
            corner,
            side,
            phi1: GridFunction::new(n, phi1)?,
            phi2: GridFunction::new(n, phi2)?,
        })
    }

    pub fn from_fn(
        corner: [f64; 2],
        side: f64,
        depth: usize,
        phi: impl Fn(f64, f64) -> [f64; 2],
    ) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::invalid(format!(
                "depth {depth} exceeds the maximum {MAX_DEPTH}"
            )));
        }
        let n = (1usize << depth) + 1;
        let h = side / (n - 1) as f64;
        let (mut p1, mut p2) = (Vec::with_capacity(n * n), Vec::with_capacity(n * n));
        for row in 0..n {
            for col in 0..n {
                let v = phi(corner[0] + col as f64 * h, corner[1] + row as f64 * h);
                p1.push(v[0]);
                p2.push(v[1]);
            }
        }
        Self::new(corner, side, depth, p1, p2)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn corner(&self) -> [f64; 2] {
        self.corner
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn points_per_side(&self) -> usize {
        self.phi1.side()
    }

    pub fn phi1(&self) -> &GridFunction {
        &self.phi1
    }

    pub fn phi2(&self) -> &GridFunction {
        &self.phi2
    }

    /// Domain coordinates of lattice point `(col, row)`.
    pub fn point(&self, col: usize, row: usize) -> [f64; 2] {
        let h = self.side / (self.points_per_side() - 1) as f64;
        [
            self.corner[0] + col as f64 * h,
            self.corner[1] + row as f64 * h,
        ]
    }

    pub fn value(&self, col: usize, row: usize) -> [f64; 2] {
        [self.phi1.at(col, row), self.phi2.at(col, row)]
    }

    /// Every `2^(depth - level)`-th sample, as a field of depth `level`.
    pub fn subsample(&self, level: usize) -> Result<SquareField> {
        if level > self.depth {
            return Err(Error::invalid(format!(
                "level {level} exceeds field depth {}",
                self.depth
            )));
        }
        let stride = 1 << (self.depth - level);
        let n = (1usize << level) + 1;
        let pick = |g: &GridFunction| {
            (0..n)
                .flat_map(|r| (0..n).map(move |c| (c, r)))
                .map(|(c, r)| g.at(c * stride, r * stride))
                .collect::<Vec<_>>()
        };
        SquareField::new(self.corner, self.side, level, pick(&self.phi1), pick(&self.phi2))
    }

    /// The field precomposed with the flip `(s, t) -> (t, s)` of the domain
    /// (taken about the square's diagonal).
    pub fn transposed(&self) -> SquareField {
        let n = self.points_per_side();
        let flip = |g: &GridFunction| {
            (0..n)
                .flat_map(|r| (0..n).map(move |c| (c, r)))
                .map(|(c, r)| g.at(r, c))
                .collect::<Vec<_>>()
        };
        SquareField::new(self.corner, self.side, self.depth, flip(&self.phi1), flip(&self.phi2))
            .expect("transposition keeps a valid field")
    }

    /// φ along ∂Q, counterclockwise from the lower-left corner, as a closed
    /// planar curve.
    pub fn boundary_curve(&self) -> SampledCurve {
        let m = self.points_per_side() - 1;
        let mut idx = Vec::with_capacity(4 * m + 1);
        idx.extend((0..m).map(|c| (c, 0)));
        idx.extend((0..m).map(|r| (m, r)));
        idx.extend((1..=m).rev().map(|c| (c, m)));
        idx.extend((1..=m).rev().map(|r| (0, r)));
        idx.push((0, 0));
        let pts: Vec<[f64; 2]> = idx.iter().map(|&(c, r)| self.value(c, r)).collect();
        let times = (0..pts.len()).map(|i| i as f64).collect();
        let coords = pts.iter().flat_map(|p| p.iter().copied()).collect();
        SampledCurve::from_flat(times, 2, coords, true).expect("boundary loop is closed")
    }

    fn squares(&self, level: usize) -> impl IndexedParallelIterator<Item = GridSquare> {
        let m = 1usize << level;
        let size = 1usize << (self.depth - level);
        (0..m * m).into_par_iter().map(move |k| GridSquare {
            col: (k % m) * size,
            row: (k / m) * size,
            size,
        })
    }

    fn corner_index(&self, sq: GridSquare) -> usize {
        sq.row * self.points_per_side() + sq.col
    }
}

/// Per-square boundary data at the lower-left base point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoughSquareData {
    pub square: GridSquare,
    /// Domain coordinates of the base point.
    pub base_point: [f64; 2],
    /// φ at the base point.
    pub x: [f64; 2],
    /// ∮ φ₁ dφ₂.
    pub x1: f64,
    /// (½∮ (φ₁ - x₁)² dφ₂, ½∮ φ₁ d(φ₂ - x₂)²).
    pub x2: [f64; 2],
    /// (½∮ φ₁² dφ₂, ½∮ φ₁ dφ₂²).
    pub x2_tilde: [f64; 2],
}

impl RoughSquareData {
    /// Relative defect of `x2 = x2_tilde - x · x1`, per component.
    pub fn identity_residual(&self) -> f64 {
        (0..2)
            .map(|k| {
                let shifted = self.x[k] * self.x1;
                let defect = self.x2[k] - (self.x2_tilde[k] - shifted);
                let scale = self.x2[k].abs().max(self.x2_tilde[k].abs()).max(shifted.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    defect.abs() / scale
                }
            })
            .fold(0.0, f64::max)
    }
}

fn circulation(a: &[f64], b: &[f64], side: usize, sq: GridSquare, step: usize) -> ExactSum {
    boundary_sum(side, sq, step, |acc, sign, u, v| left_product(acc, sign, a, b, u, v))
}

/// Exact ∮ φ₁² dφ₂ and ∮ φ₁ dφ₂² (before halving).
fn uncentred_terms(a: &[f64], b: &[f64], side: usize, sq: GridSquare, step: usize) -> [ExactSum; 2] {
    let first = boundary_sum(side, sq, step, |acc, sign, u, v| {
        acc.add_product3(sign * a[u], a[u], b[v]);
        acc.add_product3(-sign * a[u], a[u], b[u]);
    });
    let second = boundary_sum(side, sq, step, |acc, sign, u, v| {
        acc.add_product3(sign * a[u], b[v], b[v]);
        acc.add_product3(-sign * a[u], b[u], b[u]);
    });
    [first, second]
}

/// Exact centred terms ∮ (φ₁ - x₁)² dφ₂ and ∮ φ₁ d(φ₂ - x₂)² (before halving).
/// The increments of φ₂ sum to zero around a square, so expanding the squares
/// leaves the uncentred terms minus `2 x · circ`.
fn centred_terms(uncentred: &[ExactSum; 2], circ: &ExactSum, x: [f64; 2]) -> [ExactSum; 2] {
    let mut out = uncentred.clone();
    out[0].add_scaled(circ, -2.0 * x[0]);
    out[1].add_scaled(circ, -2.0 * x[1]);
    out
}

/// One record per square of the level-`level` partition, in row-major order.
pub fn compute_square_data(field: &SquareField, level: usize) -> Result<Vec<RoughSquareData>> {
    if level > field.depth {
        return Err(Error::invalid(format!(
            "level {level} exceeds field depth {}",
            field.depth
        )));
    }
    let n = field.points_per_side();
    let (a, b) = (field.phi1.values(), field.phi2.values());
    Ok(field
        .squares(level)
        .map(|sq| {
            let corner = field.corner_index(sq);
            let x = [a[corner], b[corner]];
            let circ = circulation(a, b, n, sq, 1);
            let t = uncentred_terms(a, b, n, sq, 1);
            let [d1, d2] = centred_terms(&t, &circ, x);
            RoughSquareData {
                square: sq,
                base_point: field.point(sq.col, sq.row),
                x,
                x1: circ.value(),
                x2: [0.5 * d1.value(), 0.5 * d2.value()],
                x2_tilde: [0.5 * t[0].value(), 0.5 * t[1].value()],
            }
        })
        .collect())
}

/// Exact accumulator of the X¹ value of one square, for telescoping checks.
pub fn square_circulation(field: &SquareField, sq: GridSquare) -> Result<ExactSum> {
    sq.check(field.points_per_side())?;
    Ok(circulation(
        field.phi1.values(),
        field.phi2.values(),
        field.points_per_side(),
        sq,
        1,
    ))
}

/// A test function f with its gradient.
pub trait Integrand: Sync {
    fn value(&self, q: [f64; 2]) -> f64;
    fn gradient(&self, q: [f64; 2]) -> [f64; 2];
}

/// The named family of test functions offered by the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestIntegrand {
    /// f ≡ 1
    One,
    /// f = q_x
    Qx,
    /// f = q_y
    Qy,
    /// f = q_x² / 2
    Quad,
    /// f = exp(-|q|²)
    Gauss,
}

impl TestIntegrand {
    pub const ALL: [TestIntegrand; 5] = [
        TestIntegrand::One,
        TestIntegrand::Qx,
        TestIntegrand::Qy,
        TestIntegrand::Quad,
        TestIntegrand::Gauss,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TestIntegrand::One => "one",
            TestIntegrand::Qx => "qx",
            TestIntegrand::Qy => "qy",
            TestIntegrand::Quad => "quad",
            TestIntegrand::Gauss => "gauss",
        }
    }
}

impl FromStr for TestIntegrand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown test function {s:?}")))
    }
}

impl Integrand for TestIntegrand {
    fn value(&self, [x, y]: [f64; 2]) -> f64 {
        match self {
            TestIntegrand::One => 1.0,
            TestIntegrand::Qx => x,
            TestIntegrand::Qy => y,
            TestIntegrand::Quad => 0.5 * x * x,
            TestIntegrand::Gauss => (-(x * x + y * y)).exp(),
        }
    }

    fn gradient(&self, [x, y]: [f64; 2]) -> [f64; 2] {
        match self {
            TestIntegrand::One => [0.0, 0.0],
            TestIntegrand::Qx => [1.0, 0.0],
            TestIntegrand::Qy => [0.0, 1.0],
            TestIntegrand::Quad => [x, 0.0],
            TestIntegrand::Gauss => {
                let g = (-(x * x + y * y)).exp();
                [-2.0 * x * g, -2.0 * y * g]
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub levels: Vec<usize>,
    pub values: Vec<f64>,
    /// `diffs[i] = |values[i + 1] - values[i]|`.
    pub diffs: Vec<f64>,
    /// Least-squares slope of log₂ diffs against level over the fit window.
    pub fitted_rate: Option<f64>,
    pub converged: bool,
    /// Romberg extrapolation of the finest-level values of the field
    /// subsampled to the last few depths.
    pub extrapolated: Option<f64>,
}

impl ConvergenceReport {
    pub(crate) fn new(values: Vec<f64>, diagonal: &[f64], rtol: f64) -> Self {
        let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let last = *values.last().expect("at least one level");
        let converged = diffs.last().is_some_and(|d| *d < rtol * (last.abs() + 1.0));
        ConvergenceReport {
            levels: (0..values.len()).collect(),
            fitted_rate: fit_rate(&diffs),
            extrapolated: romberg(diagonal),
            values,
            diffs,
            converged,
        }
    }

    /// Extrapolated value if available, otherwise the finest level.
    pub fn best(&self) -> f64 {
        self.extrapolated
            .unwrap_or_else(|| *self.values.last().expect("at least one level"))
    }
}

/// First level of the rate fit window when enough levels exist.
pub const FIT_START: usize = 4;

fn fit_rate(diffs: &[f64]) -> Option<f64> {
    let start = FIT_START.min(diffs.len().saturating_sub(2));
    let pts: Vec<(f64, f64)> = diffs
        .iter()
        .enumerate()
        .skip(start)
        .filter(|(_, d)| **d > 0.0)
        .map(|(i, d)| (i as f64, d.log2()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

/// Romberg table for values at mesh ratios 2^-k, assuming an error expansion in
/// integer powers of the mesh.
fn romberg(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let mut t = values.to_vec();
    for p in 1..values.len() {
        let w = (1u64 << p) as f64;
        t = t.windows(2).map(|v| (w * v[1] - v[0]) / (w - 1.0)).collect();
    }
    Some(t[0])
}

/// Σ_R weight(p_R) ∮_{∂R} g1 dg2 over the level-`level` squares, walking the
/// boundaries every `step` lattice points.
pub(crate) fn weighted_circulation(
    g1: &[f64],
    g2: &[f64],
    side: usize,
    depth: usize,
    level: usize,
    step: usize,
    weight: &(impl Fn(usize) -> f64 + Sync),
) -> f64 {
    let m = 1usize << level;
    let size = 1usize << (depth - level);
    (0..m * m)
        .into_par_iter()
        .fold(ExactSum::new, |mut acc, k| {
            let sq = GridSquare {
                col: (k % m) * size,
                row: (k / m) * size,
                size,
            };
            let w = weight(sq.row * side + sq.col);
            if w != 0.0 {
                acc.add(w * circulation(g1, g2, side, sq, step).value());
            }
            acc
        })
        .reduce(ExactSum::new, |mut a, b| {
            a.merge(&b);
            a
        })
        .value()
}

/// Levels `0..=depth` followed by the diagonal (level `M` with stride
/// `2^(depth - M)`) over the last [`EXTRAPOLATION_TERMS`] depths.
pub(crate) fn level_and_diagonal(
    depth: usize,
    eval: impl Fn(usize, usize) -> f64,
) -> (Vec<f64>, Vec<f64>) {
    let values: Vec<f64> = (0..=depth).map(|level| eval(level, 1)).collect();
    let first = depth.saturating_sub(EXTRAPOLATION_TERMS - 1);
    let diagonal = (first..=depth)
        .map(|m| {
            if m == depth {
                values[depth]
            } else {
                eval(m, 1 << (depth - m))
            }
        })
        .collect();
    (values, diagonal)
}

fn level_sum(
    field: &SquareField,
    level: usize,
    step: usize,
    f: &impl Integrand,
    second_order: bool,
) -> f64 {
    let n = field.points_per_side();
    let (a, b) = (field.phi1.values(), field.phi2.values());
    field
        .squares(level)
        .fold(ExactSum::new, |mut acc, sq| {
            let c = field.corner_index(sq);
            let x = [a[c], b[c]];
            let circ = circulation(a, b, n, sq, step);
            acc.add(f.value(x) * circ.value());
            if second_order {
                let g = f.gradient(x);
                if g != [0.0, 0.0] {
                    let t = uncentred_terms(a, b, n, sq, step);
                    let [d1, d2] = centred_terms(&t, &circ, x);
                    acc.add(g[0] * (0.5 * d1.value()));
                    acc.add(g[1] * (0.5 * d2.value()));
                }
            }
            acc
        })
        .reduce(ExactSum::new, |mut a, b| {
            a.merge(&b);
            a
        })
        .value()
}

/// I_n = Σ_R f(X_R) X¹_R for n = 0..=N.
pub fn surface_integral_first_order(
    field: &SquareField,
    f: &impl Integrand,
    rtol: f64,
) -> ConvergenceReport {
    let (values, diagonal) =
        level_and_diagonal(field.depth, |level, step| level_sum(field, level, step, f, false));
    ConvergenceReport::new(values, &diagonal, rtol)
}

/// I_n = Σ_R f(X_R) X¹_R + Df(X_R) · X²_R for n = 0..=N.
pub fn surface_integral_second_order(
    field: &SquareField,
    f: &impl Integrand,
    rtol: f64,
) -> ConvergenceReport {
    let (values, diagonal) =
        level_and_diagonal(field.depth, |level, step| level_sum(field, level, step, f, true));
    ConvergenceReport::new(values, &diagonal, rtol)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreePairing {
    /// Best first-order surface value.
    pub surface: f64,
    /// Σ over defined cells of f(q) w(q) cell² for the winding field of φ|∂Q.
    pub winding: f64,
    pub residual: f64,
    pub masked_area: f64,
    /// max |f| · max |w| over the masked cells' area.
    pub budget: f64,
}

/// Compares the dyadic surface integral with ∫ f w_{φ|∂Q} computed on a
/// winding grid of pitch `cell`.
pub fn degree_pairing_check(
    field: &SquareField,
    f: &impl Integrand,
    cell: f64,
    rtol: f64,
) -> Result<DegreePairing> {
    let report = surface_integral_first_order(field, f, rtol);
    let wf = winding_field(&field.boundary_curve(), cell)?;
    let (winding, budget) = weighted_winding(&wf, f);
    let surface = report.best();
    Ok(DegreePairing {
        surface,
        winding,
        residual: (surface - winding).abs(),
        masked_area: wf.masked_area(),
        budget,
    })
}

fn weighted_winding(wf: &WindingField, f: &impl Integrand) -> (f64, f64) {
    let area = wf.cell * wf.cell;
    let mut total = ExactSum::new();
    let mut w_max = 0i32;
    let mut masked_f = 0.0f64;
    for row in 0..wf.nrows {
        for col in 0..wf.ncols {
            let q = wf.center(col, row);
            if wf.is_defined(col, row) {
                let w = wf.value(col, row);
                w_max = w_max.max(w.abs());
                if w != 0 {
                    total.add(f.value(q) * f64::from(w) * area);
                }
            } else {
                masked_f += f.value(q).abs() * area;
            }
        }
    }
    (total.value(), f64::from(w_max) * masked_f)
}
