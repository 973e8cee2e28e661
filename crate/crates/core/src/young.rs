//! Left-point Riemann–Stieltjes sums and circulation integrals around lattice
//! squares.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ExactSum;

pub const DEFAULT_RTOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::invalid("a sampled function needs at least 2 samples"));
        }
        if times.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite sample"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("times must be strictly increasing"));
        }
        Ok(SampledFunction { times, values })
    }

    /// Samples `f` on the given grid.
    pub fn sample(times: &[f64], f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(times.to_vec(), times.iter().map(|&t| f(t)).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YoungResult {
    /// Left-point sum on the full sample grid.
    pub value: f64,
    /// Number of dyadic coarsenings of the grid that were compared.
    pub levels: usize,
    /// `|S_full - S_half|` where `S_half` uses every other sample.
    pub tail_bound: f64,
}

impl YoungResult {
    pub fn converged(&self, rtol: f64) -> bool {
        self.tail_bound < rtol * (self.value.abs() + 1.0)
    }
}

/// `Σ f_i (g_{i+1} - g_i)`, summed exactly and rounded once.
pub fn left_sum(f: &[f64], g: &[f64]) -> f64 {
    debug_assert_eq!(f.len(), g.len());
    (0..f.len().saturating_sub(1))
        .map(|i| f[i] * (g[i + 1] - g[i]))
        .collect::<ExactSum>()
        .value()
}

/// Left sum restricted to the samples `0, stride, 2 stride, ..., last`.
fn strided_left_sum(f: &[f64], g: &[f64], stride: usize) -> f64 {
    let n = f.len() - 1;
    let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
    idx.push(n);
    idx.windows(2)
        .map(|w| f[w[0]] * (g[w[1]] - g[w[0]]))
        .collect::<ExactSum>()
        .value()
}

/// ∫ f dg by left-point sums on the common sample grid. The full-grid value is
/// returned; the dyadic coarsenings only feed the convergence diagnostics.
pub fn young_integral(f: &SampledFunction, g: &SampledFunction) -> Result<YoungResult> {
    if f.times != g.times {
        return Err(Error::invalid("f and g must share the same time grid"));
    }
    let value = left_sum(&f.values, &g.values);
    let segments = f.len() - 1;
    let levels = usize::BITS as usize - 1 - segments.leading_zeros() as usize;
    let tail_bound = if segments >= 2 {
        (value - strided_left_sum(&f.values, &g.values, 2)).abs()
    } else {
        0.0
    };
    Ok(YoungResult {
        value,
        levels,
        tail_bound,
    })
}

/// Successive values of the left sum on grids coarsened by strides
/// `2^k, ..., 2, 1`, coarsest first.
pub fn dyadic_left_sums(f: &SampledFunction, g: &SampledFunction) -> Result<Vec<f64>> {
    if f.times != g.times {
        return Err(Error::invalid("f and g must share the same time grid"));
    }
    let segments = f.len() - 1;
    let mut strides = Vec::new();
    let mut s = 1;
    while s <= segments {
        strides.push(s);
        s *= 2;
    }
    Ok(strides
        .into_iter()
        .rev()
        .map(|s| strided_left_sum(&f.values, &g.values, s))
        .collect())
}

/// Scalar samples on a square `side × side` lattice, stored row by row
/// (index `row * side + col`, column = first coordinate).
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    side: usize,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(side: usize, values: Vec<f64>) -> Result<Self> {
        if side < 2 {
            return Err(Error::invalid("a lattice needs at least 2 points per side"));
        }
        if values.len() != side * side {
            return Err(Error::invalid(format!(
                "expected {} lattice values, got {}",
                side * side,
                values.len()
            )));
        }
        Ok(GridFunction { side, values })
    }

    pub fn from_fn(side: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let values = (0..side)
            .flat_map(|row| (0..side).map(move |col| (col, row)))
            .map(|(col, row)| f(col, row))
            .collect();
        Self::new(side, values)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.side + col]
    }
}

/// Axis-aligned lattice square with lower-left vertex `(col, row)` spanning
/// `size` lattice steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSquare {
    pub col: usize,
    pub row: usize,
    pub size: usize,
}

impl GridSquare {
    pub fn children(&self) -> Option<[GridSquare; 4]> {
        if self.size < 2 || self.size % 2 != 0 {
            return None;
        }
        let h = self.size / 2;
        let sq = |dc, dr| GridSquare {
            col: self.col + dc,
            row: self.row + dr,
            size: h,
        };
        Some([sq(0, 0), sq(h, 0), sq(0, h), sq(h, h)])
    }

    pub(crate) fn check(&self, side: usize) -> Result<()> {
        if self.size == 0 || self.col + self.size >= side || self.row + self.size >= side {
            return Err(Error::invalid(format!(
                "square at ({}, {}) of size {} does not fit a lattice with {} points per side",
                self.col, self.row, self.size, side
            )));
        }
        Ok(())
    }
}

/// Accumulates a per-segment quantity counterclockwise around `sq`, visiting
/// every `step`-th lattice point. `segment(acc, sign, a, b)` adds `sign` times
/// the value of a step taken in increasing-index direction between flat
/// lattice indices `a` and `b`; steps walked backwards get `sign = -1`, so the
/// value of a shared edge cancels exactly between neighbouring squares.
pub(crate) fn boundary_sum(
    side: usize,
    sq: GridSquare,
    step: usize,
    mut segment: impl FnMut(&mut ExactSum, f64, usize, usize),
) -> ExactSum {
    debug_assert!(step > 0 && sq.size % step == 0);
    let idx = |col: usize, row: usize| row * side + col;
    let (c0, r0, c1, r1) = (sq.col, sq.row, sq.col + sq.size, sq.row + sq.size);
    let mut acc = ExactSum::new();
    for c in (c0..c1).step_by(step) {
        segment(&mut acc, 1.0, idx(c, r0), idx(c + step, r0));
        segment(&mut acc, -1.0, idx(c, r1), idx(c + step, r1));
    }
    for r in (r0..r1).step_by(step) {
        segment(&mut acc, 1.0, idx(c1, r), idx(c1, r + step));
        segment(&mut acc, -1.0, idx(c0, r), idx(c0, r + step));
    }
    acc
}

/// Exact `sign * a[u] * (b[v] - b[u])`.
pub(crate) fn left_product(acc: &mut ExactSum, sign: f64, a: &[f64], b: &[f64], u: usize, v: usize) {
    acc.add_product(sign * a[u], b[v]);
    acc.add_product(-sign * a[u], b[u]);
}

/// Exact accumulator of ∮_{∂sq} g1 dg2.
pub fn circulation(g1: &GridFunction, g2: &GridFunction, sq: GridSquare) -> Result<ExactSum> {
    if g1.side != g2.side {
        return Err(Error::invalid("g1 and g2 are sampled on different lattices"));
    }
    sq.check(g1.side)?;
    let (a, b) = (&g1.values, &g2.values);
    Ok(boundary_sum(g1.side, sq, 1, |acc, sign, u, v| left_product(acc, sign, a, b, u, v)))
}

/// ∮_{∂sq} g1 dg2, counterclockwise, with left-point sums along each edge.
pub fn boundary_integral(g1: &GridFunction, g2: &GridFunction, sq: GridSquare) -> Result<f64> {
    circulation(g1, g2, sq).map(|acc| acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..=n).map(|i| i as f64 / n as f64).collect()
    }

    #[test]
    fn constant_integrand_telescopes() {
        let t = grid(37);
        let f = SampledFunction::sample(&t, |_| 1.0).unwrap();
        let g = SampledFunction::sample(&t, |t| (3.0 * t).sin()).unwrap();
        let r = young_integral(&f, &g).unwrap();
        assert!((r.value - 3f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn polynomial_integrals() {
        let t = grid(10_000);
        let id = SampledFunction::sample(&t, |t| t).unwrap();
        let sq = SampledFunction::sample(&t, |t| t * t).unwrap();
        let r = young_integral(&id, &id).unwrap();
        assert!((r.value - 0.5).abs() < 1e-4);
        let r = young_integral(&id, &sq).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 2e-4);
        assert_eq!(r.levels, 13);
        assert!(r.tail_bound > 0.0 && r.tail_bound < 1e-4);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let f = SampledFunction::sample(&grid(4), |t| t).unwrap();
        let g = SampledFunction::sample(&grid(5), |t| t).unwrap();
        assert!(young_integral(&f, &g).is_err());
        assert!(SampledFunction::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(SampledFunction::new(vec![1.0, 0.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn dyadic_sums_end_with_full_grid() {
        let t = grid(64);
        let f = SampledFunction::sample(&t, |t| t.cos()).unwrap();
        let g = SampledFunction::sample(&t, |t| t.exp()).unwrap();
        let sums = dyadic_left_sums(&f, &g).unwrap();
        assert_eq!(sums.len(), 7);
        assert_eq!(*sums.last().unwrap(), young_integral(&f, &g).unwrap().value);
    }

    fn unit_lattice(n: usize, f: impl Fn(f64, f64) -> f64) -> GridFunction {
        let h = 1.0 / n as f64;
        GridFunction::from_fn(n + 1, |c, r| f(c as f64 * h, r as f64 * h)).unwrap()
    }

    #[test]
    fn green_on_unit_square() {
        let n = 64;
        let x = unit_lattice(n, |x, _| x);
        let y = unit_lattice(n, |_, y| y);
        let whole = GridSquare { col: 0, row: 0, size: n };
        assert!((boundary_integral(&x, &y, whole).unwrap() - 1.0).abs() < 1e-14);
        assert!((boundary_integral(&y, &x, whole).unwrap() + 1.0).abs() < 1e-14);
        let xx = unit_lattice(n, |x, _| x * x);
        // Left sums along the vertical edges see x² exactly.
        assert!((boundary_integral(&xx, &y, whole).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn misplaced_square_rejected() {
        let x = unit_lattice(4, |x, _| x);
        let sq = GridSquare { col: 2, row: 0, size: 3 };
        assert!(boundary_integral(&x, &x, sq).is_err());
        let zero = GridSquare { col: 0, row: 0, size: 0 };
        assert!(boundary_integral(&x, &x, zero).is_err());
    }

    proptest! {
        #[test]
        fn children_merge_to_parent_bitwise(seed in prop::collection::vec(-2.0f64..2.0, 81 * 2), col in 0usize..5, row in 0usize..5) {
            let g1 = GridFunction::new(9, seed[..81].to_vec()).unwrap();
            let g2 = GridFunction::new(9, seed[81..].to_vec()).unwrap();
            let parent = GridSquare { col: col.min(4), row: row.min(4), size: 4 };
            let mut merged = ExactSum::new();
            for child in parent.children().unwrap() {
                merged.merge(&circulation(&g1, &g2, child).unwrap());
            }
            let whole = boundary_integral(&g1, &g2, parent).unwrap();
            prop_assert_eq!(merged.value().to_bits(), whole.to_bits());
        }

        #[test]
        fn bilinear_in_integrand(a in -3.0f64..3.0, b in -3.0f64..3.0, seed in prop::collection::vec(-1.0f64..1.0, 3 * 40)) {
            let t = grid(39);
            let f = SampledFunction::new(t.clone(), seed[..40].to_vec()).unwrap();
            let h = SampledFunction::new(t.clone(), seed[40..80].to_vec()).unwrap();
            let g = SampledFunction::new(t.clone(), seed[80..].to_vec()).unwrap();
            let combo = SampledFunction::new(t, f.values().iter().zip(h.values()).map(|(x, y)| a * x + b * y).collect()).unwrap();
            let lhs = young_integral(&combo, &g).unwrap().value;
            let rhs = a * young_integral(&f, &g).unwrap().value + b * young_integral(&h, &g).unwrap().value;
            let scale: f64 = (0..39).map(|i| (a.abs() * f.values()[i].abs() + b.abs() * h.values()[i].abs()) * (g.values()[i + 1] - g.values()[i]).abs()).sum();
            prop_assert!((lhs - rhs).abs() <= 1e-14 * (scale + 1e-300));
        }

        #[test]
        fn closed_loop_parts_identity(seed in prop::collection::vec(-1.0f64..1.0, 2 * 30)) {
            // On a closed loop, ∫f dg + ∫g df = -Σ Δf Δg for left sums.
            let mut fv = seed[..30].to_vec();
            let mut gv = seed[30..].to_vec();
            fv.push(fv[0]);
            gv.push(gv[0]);
            let t = grid(30);
            let f = SampledFunction::new(t.clone(), fv.clone()).unwrap();
            let g = SampledFunction::new(t, gv.clone()).unwrap();
            let lhs = young_integral(&f, &g).unwrap().value + young_integral(&g, &f).unwrap().value;
            let cov: f64 = (0..30).map(|i| (fv[i + 1] - fv[i]) * (gv[i + 1] - gv[i])).sum();
            prop_assert!((lhs + cov).abs() < 1e-13);
        }
    }
}
