//! Sampled curves and moduli of continuity.
//!
//! A [`SampledCurve`] is a finite sequence of samples `t_i -> p_i` in `R^d`,
//! read as its piecewise-linear interpolant. Everything in this module works
//! on the samples only: Hölder constants are maxima over sample pairs, and
//! the σ-variation is the supremum over partitions drawn from the sample grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Above this many samples, [`estimate_holder_constant`] only inspects pairs at
/// power-of-two lags.
pub const EXHAUSTIVE_PAIR_LIMIT: usize = 2000;

#[derive(Clone, Debug, PartialEq)]
pub struct SampledCurve {
    times: Vec<f64>,
    dim: usize,
    coords: Vec<f64>,
    closed: bool,
}

impl SampledCurve {
    pub fn new(times: Vec<f64>, points: Vec<Vec<f64>>, closed: bool) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::invalid("points have inconsistent dimensions"));
        }
        let coords = points.into_iter().flatten().collect();
        Self::from_flat(times, dim, coords, closed)
    }

    /// Builds a curve from row-major coordinates (`coords.len() == times.len() * dim`).
    pub fn from_flat(times: Vec<f64>, dim: usize, coords: Vec<f64>, closed: bool) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::invalid(format!(
                "a curve needs at least 2 samples, got {}",
                times.len()
            )));
        }
        if dim == 0 {
            return Err(Error::invalid("points must have at least one coordinate"));
        }
        if coords.len() != times.len() * dim {
            return Err(Error::invalid(format!(
                "{} times but {} coordinates for dimension {dim}",
                times.len(),
                coords.len()
            )));
        }
        if times.iter().chain(&coords).any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite time or coordinate"));
        }
        if let Some(k) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!(
                "times must be strictly increasing (sample {} -> {})",
                k,
                k + 1
            )));
        }
        let curve = SampledCurve {
            times,
            dim,
            coords,
            closed,
        };
        if closed {
            let last = curve.len() - 1;
            let same = curve
                .point(0)
                .iter()
                .zip(curve.point(last))
                .all(|(a, b)| a.to_bits() == b.to_bits());
            if !same {
                return Err(Error::invalid("closed curve must end where it starts"));
            }
        }
        Ok(curve)
    }

    /// Closed planar polygon through `vertices`, with the first vertex repeated at
    /// the end and times `0, 1, ..., n`.
    pub fn closed_polygon(vertices: &[[f64; 2]]) -> Result<Self> {
        let n = vertices.len();
        if n == 0 {
            return Err(Error::invalid("empty polygon"));
        }
        let mut coords = Vec::with_capacity(2 * (n + 1));
        for v in vertices.iter().chain(std::iter::once(&vertices[0])) {
            coords.extend_from_slice(v);
        }
        let times = (0..=n).map(|i| i as f64).collect();
        Self::from_flat(times, 2, coords, true)
    }

    /// Planar curve from `(x, y)` samples at the given times. Closed if the
    /// first and last samples coincide.
    pub fn planar(times: Vec<f64>, points: &[[f64; 2]]) -> Result<Self> {
        let closed = points.len() > 1
            && points[0]
                .iter()
                .zip(&points[points.len() - 1])
                .all(|(a, b)| a.to_bits() == b.to_bits());
        let coords = points.iter().flat_map(|p| p.iter().copied()).collect();
        Self::from_flat(times, 2, coords, closed)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Row-major coordinates.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// The `k`-th coordinate of every sample.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.points().map(|p| p[k]).collect()
    }

    /// Planar sample `i`; panics if the curve is not planar.
    pub fn xy(&self, i: usize) -> [f64; 2] {
        assert_eq!(self.dim, 2, "xy() on a {}-dimensional curve", self.dim);
        [self.coords[2 * i], self.coords[2 * i + 1]]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }

    /// Same points on a new time grid.
    pub fn with_times(&self, times: Vec<f64>) -> Result<Self> {
        Self::from_flat(times, self.dim, self.coords.clone(), self.closed)
    }

    /// Same image traversed backwards (times `t_0 + t_n - t_i`).
    pub fn reversed(&self) -> Self {
        let n = self.len();
        let (a, b) = (self.times[0], self.times[n - 1]);
        let times = self.times.iter().rev().map(|t| a + (b - t)).collect::<Vec<_>>();
        let coords = (0..n)
            .rev()
            .flat_map(|i| self.point(i).iter().copied())
            .collect();
        // Reflected times can lose strict monotonicity only through rounding of
        // nearly equal samples; fall back to integer times in that case.
        Self::from_flat(times, self.dim, coords, self.closed)
            .or_else(|_| {
                let coords = (0..n).rev().flat_map(|i| self.point(i).iter().copied()).collect();
                Self::from_flat((0..n).map(|i| i as f64).collect(), self.dim, coords, self.closed)
            })
            .expect("reversal of a valid curve is valid")
    }

    /// Applies `f` to every sample point.
    pub fn map_points(&self, dim: usize, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<Self> {
        let mut coords = Vec::with_capacity(self.len() * dim);
        for p in self.points() {
            let q = f(p);
            if q.len() != dim {
                return Err(Error::invalid("mapped point has the wrong dimension"));
            }
            coords.extend(q);
        }
        let closed = self.closed && coords[..dim] == coords[coords.len() - dim..];
        Self::from_flat(self.times.clone(), dim, coords, closed)
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// A continuous, strictly increasing σ with σ(0) = 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Modulus {
    /// σ(t) = constant · t^exponent.
    Power { constant: f64, exponent: f64 },
    /// Piecewise-linear through the knots; defined on `[0, last knot]`.
    Table { knots: Vec<(f64, f64)> },
}

impl Modulus {
    pub fn identity() -> Self {
        Modulus::Power {
            constant: 1.0,
            exponent: 1.0,
        }
    }

    pub fn power(constant: f64, exponent: f64) -> Result<Self> {
        if !(constant > 0.0 && constant.is_finite()) {
            return Err(Error::invalid(format!(
                "power modulus needs a positive constant, got {constant}"
            )));
        }
        if !(exponent > 0.0 && exponent <= 1.0) {
            return Err(Error::invalid(format!(
                "power modulus exponent must lie in (0, 1], got {exponent}"
            )));
        }
        Ok(Modulus::Power { constant, exponent })
    }

    pub fn table(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::invalid("a modulus table needs at least two knots"));
        }
        if knots[0] != (0.0, 0.0) {
            return Err(Error::invalid("a modulus table must start at (0, 0)"));
        }
        if knots.iter().any(|(t, s)| !t.is_finite() || !s.is_finite()) {
            return Err(Error::invalid("non-finite modulus knot"));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0 || w[1].1 <= w[0].1) {
            return Err(Error::invalid(
                "modulus knots must be strictly increasing in both coordinates",
            ));
        }
        Ok(Modulus::Table { knots })
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::invalid(format!("modulus evaluated at {t}")));
        }
        match self {
            Modulus::Power { constant, exponent } => Ok(constant * t.powf(*exponent)),
            Modulus::Table { knots } => {
                let max = knots[knots.len() - 1].0;
                if t > max {
                    return Err(Error::ModulusRange { value: t, max });
                }
                Ok(interpolate(knots, t, |k| k.0, |k| k.1))
            }
        }
    }

    pub fn inverse(&self, v: f64) -> Result<f64> {
        if !(v >= 0.0) {
            return Err(Error::invalid(format!("modulus inverse evaluated at {v}")));
        }
        match self {
            Modulus::Power { constant, exponent } => {
                if *exponent == 1.0 {
                    Ok(v / constant)
                } else {
                    Ok((v / constant).powf(1.0 / exponent))
                }
            }
            Modulus::Table { knots } => {
                let max = knots[knots.len() - 1].1;
                if v > max {
                    return Err(Error::ModulusRange { value: v, max });
                }
                Ok(interpolate(knots, v, |k| k.1, |k| k.0))
            }
        }
    }
}

/// Linear interpolation in a table sorted by `key`.
fn interpolate(
    knots: &[(f64, f64)],
    x: f64,
    key: impl Fn(&(f64, f64)) -> f64,
    val: impl Fn(&(f64, f64)) -> f64,
) -> f64 {
    let k = knots.partition_point(|kn| key(kn) <= x);
    if k == 0 {
        return val(&knots[0]);
    }
    if k == knots.len() {
        return val(&knots[k - 1]);
    }
    let (a, b) = (&knots[k - 1], &knots[k]);
    let w = (x - key(a)) / (key(b) - key(a));
    val(a) + w * (val(b) - val(a))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub alpha: f64,
    pub constant: f64,
    pub pair_count: usize,
    /// `false` when only power-of-two lags were inspected; the constant is then
    /// a lower bound for the all-pairs value.
    pub exhaustive: bool,
}

/// Largest ratio `|p_j - p_i| / (t_j - t_i)^alpha` over sample pairs.
pub fn estimate_holder_constant(curve: &SampledCurve, alpha: f64) -> Result<HolderEstimate> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let n = curve.len();
    let t = curve.times();
    let ratio = |i: usize, j: usize| curve.distance(i, j) / (t[j] - t[i]).powf(alpha);
    let mut constant = 0.0f64;
    let mut pairs = 0usize;
    let exhaustive = n <= EXHAUSTIVE_PAIR_LIMIT;
    if exhaustive {
        for i in 0..n {
            for j in i + 1..n {
                constant = constant.max(ratio(i, j));
            }
        }
        pairs = n * (n - 1) / 2;
    } else {
        let mut lag = 1;
        while lag < n {
            for i in 0..n - lag {
                constant = constant.max(ratio(i, i + lag));
            }
            pairs += n - lag;
            lag *= 2;
        }
    }
    Ok(HolderEstimate {
        alpha,
        constant,
        pair_count: pairs,
        exhaustive,
    })
}

/// Empirical modulus of continuity ω(h) = max{|p_i - p_j| : |t_i - t_j| ≤ h}
/// tabulated at the given lags (which must start at 0 and increase).
pub fn empirical_modulus(curve: &SampledCurve, lags: &[f64]) -> Result<Vec<(f64, f64)>> {
    if lags.first() != Some(&0.0) || lags.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("lags must start at 0 and increase strictly"));
    }
    let n = curve.len();
    let t = curve.times();
    let mut omega = vec![0.0f64; lags.len()];
    for i in 0..n {
        for j in i + 1..n {
            let gap = t[j] - t[i];
            let k = lags.partition_point(|&h| h < gap);
            if k < lags.len() {
                omega[k] = omega[k].max(curve.distance(i, j));
            }
        }
    }
    // ω is a running maximum over lags.
    for k in 1..omega.len() {
        omega[k] = omega[k].max(omega[k - 1]);
    }
    Ok(lags.iter().copied().zip(omega).collect())
}

/// Integral of the piecewise-linear interpolant of `knots` over `[a, b]`.
fn piecewise_linear_integral(knots: &[(f64, f64)], a: f64, b: f64) -> f64 {
    let at = |x: f64| interpolate(knots, x, |k| k.0, |k| k.1);
    let mut total = 0.0;
    let mut left = a;
    let mut f_left = at(a);
    for &(t, v) in knots.iter().filter(|(t, _)| *t > a && *t < b) {
        total += 0.5 * (f_left + v) * (t - left);
        left = t;
        f_left = v;
    }
    total + 0.5 * (f_left + at(b)) * (b - left)
}

/// Turns an increasing modulus table ω into the strictly increasing
/// σ(t) = t + (1/t) ∫_t^{2t} ω(s) ds, sampled on the knots of ω where `2t`
/// stays inside the table.
pub fn smooth_modulus(omega: &[(f64, f64)]) -> Result<Modulus> {
    if omega.len() < 2 {
        return Err(Error::invalid("omega needs at least two knots"));
    }
    if omega[0] != (0.0, 0.0) {
        return Err(Error::invalid("omega must start at (0, 0)"));
    }
    if omega.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::invalid("omega knots must have increasing abscissae"));
    }
    if omega.windows(2).any(|w| w[1].1 < w[0].1) {
        return Err(Error::invalid("omega must be increasing"));
    }
    let last = omega[omega.len() - 1].0;
    let mut knots = vec![(0.0, 0.0)];
    for &(t, _) in omega.iter().skip(1).take_while(|(t, _)| 2.0 * t <= last) {
        let mean = piecewise_linear_integral(omega, t, 2.0 * t) / t;
        knots.push((t, t + mean));
    }
    Modulus::table(knots)
}

/// Prefix σ-variations `V[j]` of a discrete path of `n` samples, where
/// `dist(i, j)` is the distance between samples `i < j`. `V[j]` is the
/// largest partition sum over sample subsequences from `0` to `j`.
pub(crate) fn variation_profile(
    n: usize,
    dist: impl Fn(usize, usize) -> f64,
    sigma: &Modulus,
) -> Result<Vec<f64>> {
    let mut v = vec![0.0f64; n];
    for j in 1..n {
        let mut best = 0.0f64;
        for i in 0..j {
            best = best.max(v[i] + sigma.inverse(dist(i, j))?);
        }
        v[j] = best;
    }
    Ok(v)
}

/// σ-variation of a curve: the supremum over partitions of Σ σ⁻¹(|Δp|).
pub fn sigma_variation(curve: &SampledCurve, sigma: &Modulus) -> Result<f64> {
    let v = variation_profile(curve.len(), |i, j| curve.distance(i, j), sigma)?;
    Ok(v[v.len() - 1])
}

/// Reparameterizes by prefix σ-variation. Runs of samples with equal new time
/// (constant stretches) collapse to one sample; the final run keeps its last
/// sample so both endpoints survive unchanged.
pub fn reparameterize_by_variation(curve: &SampledCurve, sigma: &Modulus) -> Result<SampledCurve> {
    let v = variation_profile(curve.len(), |i, j| curve.distance(i, j), sigma)?;
    let n = v.len();
    let mut keep: Vec<usize> = Vec::with_capacity(n);
    for j in 0..n {
        match keep.last() {
            Some(&k) if v[k] == v[j] => {
                if j == n - 1 {
                    *keep.last_mut().unwrap() = j;
                }
            }
            _ => keep.push(j),
        }
    }
    if keep.len() < 2 {
        return Err(Error::invalid("curve has zero σ-variation"));
    }
    let times = keep.iter().map(|&k| v[k]).collect();
    let coords = keep
        .iter()
        .flat_map(|&k| curve.point(k).iter().copied())
        .collect();
    SampledCurve::from_flat(times, curve.dim(), coords, curve.is_closed())
}

/// Erases loops: scanning left to right, each sample `a` is matched with the
/// last later sample `b` within `tol` of it and the stretch `[a, b)` is frozen at
/// `p_a`. Times and endpoints are unchanged. On a closed curve the closing
/// sample is never a match, so the result is still a loop.
pub fn loop_erase(curve: &SampledCurve, tol: f64) -> SampledCurve {
    let n = curve.len();
    let dim = curve.dim();
    let last = if curve.is_closed() { n - 1 } else { n };
    let mut coords = curve.coords().to_vec();
    let mut i = 0;
    while i < n {
        match (i + 1..last).rev().find(|&j| curve.distance(i, j) <= tol) {
            Some(j) => {
                let base = curve.point(i).to_vec();
                for k in i + 1..j {
                    coords[k * dim..(k + 1) * dim].copy_from_slice(&base);
                }
                i = j;
            }
            None => i += 1,
        }
    }
    SampledCurve::from_flat(curve.times().to_vec(), dim, coords, curve.is_closed())
        .expect("loop erasure keeps times and endpoints")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(n: usize) -> SampledCurve {
        let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let pts = times.iter().map(|&t| vec![t, 0.0]).collect();
        SampledCurve::new(times, pts, false).unwrap()
    }

    fn v_shape(n: usize) -> SampledCurve {
        // (0,0) -> (1/√2, 1/√2) -> (√2, 0): two unit legs.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut pts = Vec::new();
        for i in 0..=n {
            let s = i as f64 / n as f64;
            pts.push(vec![s * h, s * h]);
        }
        for i in 1..=n {
            let s = i as f64 / n as f64;
            pts.push(vec![h + s * h, h - s * h]);
        }
        let times = (0..pts.len()).map(|i| i as f64).collect();
        SampledCurve::new(times, pts, false).unwrap()
    }

    #[test]
    fn rejects_bad_curves() {
        assert!(SampledCurve::new(vec![0.0], vec![vec![0.0]], false).is_err());
        assert!(SampledCurve::new(vec![0.0, 0.0], vec![vec![0.0], vec![1.0]], false).is_err());
        assert!(SampledCurve::new(vec![0.0, 1.0], vec![vec![0.0], vec![1.0]], true).is_err());
        assert!(SampledCurve::new(vec![0.0, 1.0], vec![vec![0.0], vec![0.0, 1.0]], false).is_err());
    }

    #[test]
    fn holder_constant_of_line_and_constant() {
        let est = estimate_holder_constant(&line(50), 1.0).unwrap();
        assert!((est.constant - 1.0).abs() < 1e-12);
        assert!(est.exhaustive);
        let c = SampledCurve::new(vec![0.0, 0.5, 1.0], vec![vec![3.0]; 3], false).unwrap();
        assert_eq!(estimate_holder_constant(&c, 0.3).unwrap().constant, 0.0);
        assert!(estimate_holder_constant(&c, 0.0).is_err());
        assert!(estimate_holder_constant(&c, 1.5).is_err());
    }

    #[test]
    fn holder_constant_of_square_root() {
        // sup |√t - √s| / |t - s|^{1/2} = 1, attained with s = 0.
        let n = 400;
        let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let pts = times.iter().map(|t| vec![t.sqrt(), 0.0]).collect();
        let c = SampledCurve::new(times.clone(), pts, false).unwrap();
        let est = estimate_holder_constant(&c, 0.5).unwrap();
        // Brute force over the same samples.
        let mut brute = 0.0f64;
        for i in 0..=n {
            for j in i + 1..=n {
                brute = brute.max((times[j].sqrt() - times[i].sqrt()) / (times[j] - times[i]).sqrt());
            }
        }
        assert_eq!(est.constant, brute);
        assert!((est.constant - 1.0).abs() < 1e-9);
    }

    #[test]
    fn large_curves_use_dyadic_lags() {
        let c = line(3000);
        let est = estimate_holder_constant(&c, 1.0).unwrap();
        assert!(!est.exhaustive);
        assert!(est.pair_count < 3001 * 3000 / 2);
        assert!((est.constant - 1.0).abs() < 1e-9);
    }

    #[test]
    fn modulus_tables() {
        let m = Modulus::table(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 3.0)]).unwrap();
        assert_eq!(m.eval(0.5).unwrap(), 1.0);
        assert_eq!(m.eval(1.5).unwrap(), 2.5);
        assert_eq!(m.inverse(2.5).unwrap(), 1.5);
        assert!(matches!(m.inverse(3.5), Err(Error::ModulusRange { .. })));
        assert!(matches!(m.eval(2.5), Err(Error::ModulusRange { .. })));
        assert!(Modulus::table(vec![(0.0, 0.0), (1.0, 0.0)]).is_err());
        assert!(Modulus::table(vec![(0.1, 0.0), (1.0, 1.0)]).is_err());
        assert!(Modulus::power(0.0, 0.5).is_err());
        let p = Modulus::power(2.0, 0.5).unwrap();
        assert!((p.inverse(p.eval(0.3).unwrap()).unwrap() - 0.3).abs() < 1e-15);
    }

    fn grid(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (0..=400).map(|i| i as f64 / 100.0).map(|t| (t, f(t))).collect()
    }

    #[test]
    fn smoothing_zero_and_linear_moduli() {
        let sigma = smooth_modulus(&grid(|_| 0.0)).unwrap();
        for t in [0.0, 0.5, 1.0, 2.0] {
            assert!((sigma.eval(t).unwrap() - t).abs() < 1e-14);
        }
        // (1/t) ∫_t^{2t} s ds = 3t/2, exact for piecewise-linear ω.
        let sigma = smooth_modulus(&grid(|s| s)).unwrap();
        for t in [0.25, 1.0, 2.0] {
            assert!((sigma.eval(t).unwrap() - 2.5 * t).abs() < 1e-12);
        }
    }

    #[test]
    fn smoothing_quadratic_modulus() {
        // (1/t) ∫_t^{2t} s² ds = 7t²/3; linear interpolation on a 0.01 grid
        // overestimates by at most h²/8 · 2 = 2.5e-5.
        let omega = grid(|s| s * s);
        let sigma = smooth_modulus(&omega).unwrap();
        for t in [0.1, 0.5, 1.0, 2.0] {
            let want = t + 7.0 / 3.0 * t * t;
            assert!((sigma.eval(t).unwrap() - want).abs() < 3e-5, "t = {t}");
        }
        if let Modulus::Table { knots } = &sigma {
            for (&(t, s), &(_, w)) in knots.iter().zip(&omega) {
                assert!(s >= w, "σ({t}) = {s} < ω = {w}");
            }
        }
    }

    #[test]
    fn smoothing_rejects_decreasing_omega() {
        assert!(smooth_modulus(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.5)]).is_err());
    }

    #[test]
    fn variation_of_simple_curves() {
        let id = Modulus::identity();
        let c = SampledCurve::new(vec![0.0, 1.0, 2.0], vec![vec![1.0, 1.0]; 3], false).unwrap();
        assert_eq!(sigma_variation(&c, &id).unwrap(), 0.0);
        assert!((sigma_variation(&line(64), &id).unwrap() - 1.0).abs() < 1e-12);
    }

    /// All subsets of interior samples, as a partition-sum oracle.
    fn brute_variation(c: &SampledCurve, sigma: &Modulus) -> f64 {
        let n = c.len();
        let inner = n - 2;
        let mut best = 0.0f64;
        for mask in 0u32..(1 << inner) {
            let mut idx = vec![0];
            idx.extend((0..inner).filter(|b| mask & (1 << b) != 0).map(|b| b + 1));
            idx.push(n - 1);
            let s: f64 = idx
                .windows(2)
                .map(|w| sigma.inverse(c.distance(w[0], w[1])).unwrap())
                .sum();
            best = best.max(s);
        }
        best
    }

    #[test]
    fn variation_of_v_shape_matches_partition_oracle() {
        let c = v_shape(6);
        let id = Modulus::identity();
        let want = brute_variation(&c, &id);
        assert!((want - 2.0).abs() < 1e-12);
        assert!((sigma_variation(&c, &id).unwrap() - want).abs() < 1e-12);
        let holder = Modulus::power(1.0, 0.5).unwrap();
        let want = brute_variation(&c, &holder);
        assert!((sigma_variation(&c, &holder).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn variation_range_error() {
        let m = Modulus::table(vec![(0.0, 0.0), (1.0, 0.5)]).unwrap();
        assert!(matches!(
            sigma_variation(&line(4), &m),
            Err(Error::ModulusRange { .. })
        ));
    }

    #[test]
    fn reparameterization_cases() {
        let id = Modulus::identity();
        let l = line(20);
        let r = reparameterize_by_variation(&l, &id).unwrap();
        for (a, b) in r.times().iter().zip(l.times()) {
            assert!((a - b).abs() < 1e-12);
        }

        let pts = vec![vec![0.0], vec![1.0], vec![1.0], vec![1.0], vec![2.0]];
        let c = SampledCurve::new((0..5).map(f64::from).collect(), pts, false).unwrap();
        let r = reparameterize_by_variation(&c, &id).unwrap();
        assert_eq!(r.times(), &[0.0, 1.0, 2.0]);
        assert_eq!(r.component(0), vec![0.0, 1.0, 2.0]);

        // Cumulative σ⁻¹ increments (the V-shape has no shortcuts for σ = id).
        let v = v_shape(5);
        let r = reparameterize_by_variation(&v, &id).unwrap();
        let mut acc = 0.0;
        for i in 0..v.len() {
            if i > 0 {
                acc += v.distance(i - 1, i);
            }
            assert!((r.times()[i] - acc).abs() < 1e-12);
        }
    }

    #[test]
    fn loop_erase_figure_eight_and_double_circle() {
        let m = 32;
        let circle = |cx: f64, phase: f64, dir: f64, k: usize| {
            let a = phase + dir * 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            [cx + a.cos(), a.sin()]
        };
        // Left lobe from the shared point (0,0) back to it, then the right lobe
        // stopping one sample short of closing.
        let mut pts = vec![[0.0, 0.0]];
        pts.extend((1..m).map(|k| circle(-1.0, 0.0, 1.0, k)));
        pts.push([0.0, 0.0]);
        pts.extend((1..m).map(|k| circle(1.0, std::f64::consts::PI, -1.0, k)));
        let times = (0..pts.len()).map(|i| i as f64).collect();
        let c = SampledCurve::planar(times, &pts).unwrap();
        let erased = loop_erase(&c, 0.0);
        let r = reparameterize_by_variation(&erased, &Modulus::identity()).unwrap();
        assert_eq!(r.len(), m);
        assert_injective(&r, 0.0);
        assert_eq!(r.point(0), c.point(0));
        assert_eq!(r.point(r.len() - 1), c.point(c.len() - 1));

        // Circle traversed twice, open at the end.
        let base: Vec<[f64; 2]> = (0..m).map(|k| circle(0.0, 0.0, 1.0, k)).collect();
        let pts: Vec<[f64; 2]> = (0..2 * m).map(|k| base[k % m]).collect();
        let times = (0..pts.len()).map(|i| i as f64).collect();
        let c = SampledCurve::planar(times, &pts).unwrap();
        let r = reparameterize_by_variation(&loop_erase(&c, 0.0), &Modulus::identity()).unwrap();
        assert_eq!(r.len(), m);
        assert_injective(&r, 0.0);

        // Closed double circle: the first turn is erased, the second survives
        // as a loop.
        let closed = SampledCurve::closed_polygon(&pts).unwrap();
        let r = reparameterize_by_variation(&loop_erase(&closed, 0.0), &Modulus::identity()).unwrap();
        assert_eq!(r.len(), m + 1);
        assert!(r.is_closed());
        assert_eq!(r.point(0), r.point(m));
        let single = SampledCurve::closed_polygon(&base).unwrap();
        assert_eq!(loop_erase(&single, 0.0), single);
    }

    #[test]
    fn loop_erase_keeps_injective_curves() {
        let l = line(10);
        assert_eq!(loop_erase(&l, 0.0), l);
    }

    fn assert_injective(c: &SampledCurve, tol: f64) {
        for i in 0..c.len() {
            for j in i + 2..c.len() {
                assert!(c.distance(i, j) > tol, "samples {i} and {j} coincide");
            }
        }
    }

    fn arb_curve() -> impl Strategy<Value = SampledCurve> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, 0.01f64..1.0), 2..30).prop_map(|v| {
            let mut t = 0.0;
            let mut times = Vec::new();
            let mut pts = Vec::new();
            for (x, y, dt) in v {
                t += dt;
                times.push(t);
                pts.push(vec![x, y]);
            }
            SampledCurve::new(times, pts, false).unwrap()
        })
    }

    proptest! {
        #[test]
        fn refinement_never_lowers_holder_estimate(c in arb_curve(), alpha in 0.2f64..1.0, drop in 0usize..30) {
            let full = estimate_holder_constant(&c, alpha).unwrap().constant;
            if c.len() > 2 {
                let k = 1 + drop % (c.len() - 2);
                let times: Vec<f64> = c.times().iter().enumerate().filter(|(i, _)| *i != k).map(|(_, t)| *t).collect();
                let pts: Vec<Vec<f64>> = c.points().enumerate().filter(|(i, _)| *i != k).map(|(_, p)| p.to_vec()).collect();
                let coarse = SampledCurve::new(times, pts, false).unwrap();
                prop_assert!(estimate_holder_constant(&coarse, alpha).unwrap().constant <= full);
            }
        }

        #[test]
        fn variation_ignores_time_remaps(c in arb_curve(), scale in 0.1f64..10.0) {
            let sigma = Modulus::power(1.0, 0.7).unwrap();
            let remapped = c.with_times(c.times().iter().map(|t| scale * t * t + t).collect()).unwrap();
            prop_assert_eq!(sigma_variation(&c, &sigma).unwrap(), sigma_variation(&remapped, &sigma).unwrap());
        }

        #[test]
        fn reparameterized_curve_is_sigma_continuous(c in arb_curve(), alpha in 0.3f64..1.0) {
            let sigma = Modulus::power(1.5, alpha).unwrap();
            if let Ok(r) = reparameterize_by_variation(&c, &sigma) {
                let t = r.times();
                for i in 0..r.len() {
                    for j in i + 1..r.len() {
                        prop_assert!(r.distance(i, j) <= sigma.eval(t[j] - t[i]).unwrap() * (1.0 + 1e-9));
                    }
                }
            }
        }

        #[test]
        fn loop_erase_preserves_endpoints_and_image(c in arb_curve(), tol in 0.0f64..0.5) {
            let e = loop_erase(&c, tol);
            prop_assert_eq!(e.point(0), c.point(0));
            prop_assert_eq!(e.point(e.len() - 1), c.point(c.len() - 1));
            for p in e.points() {
                prop_assert!(c.points().any(|q| q == p));
            }
            // Only consecutive distinct samples may be within tol.
            let mut distinct: Vec<&[f64]> = Vec::new();
            for p in e.points() {
                if distinct.last() != Some(&p) {
                    distinct.push(p);
                }
            }
            for i in 0..distinct.len() {
                for j in i + 2..distinct.len() {
                    prop_assert!(euclidean(distinct[i], distinct[j]) > tol);
                }
            }
        }
    }
}
