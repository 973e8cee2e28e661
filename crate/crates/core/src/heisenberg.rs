//! Korányi geometry, horizontal lifts and the lifting identities.

use serde::{Deserialize, Serialize};

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::exact::ExactSum;
use crate::surface::{level_and_diagonal, weighted_circulation, ConvergenceReport, SquareField};
use crate::young::{young_integral, SampledFunction};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl HeisenbergPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        HeisenbergPoint { x, y, z }
    }
}

/// d_K(p, q) = [((Δx)² + (Δy)²)² + 16 (Δz - ½(p_x q_y - p_y q_x))²]^{1/4}.
pub fn koranyi_distance(p: HeisenbergPoint, q: HeisenbergPoint) -> f64 {
    let (dx, dy) = (q.x - p.x, q.y - p.y);
    let planar = dx * dx + dy * dy;
    let vertical = q.z - p.z - 0.5 * (p.x * q.y - p.y * q.x);
    (planar * planar + 16.0 * vertical * vertical).sqrt().sqrt()
}

/// ½ (x_a y_b - y_a x_b): the left-point value of ½(x dy - y dx) on a step,
/// written so that reversing the step negates it exactly.
fn lift_increment(a: [f64; 2], b: [f64; 2]) -> f64 {
    0.5 * (a[0] * b[1] - a[1] * b[0])
}

/// Lifts a planar curve to (x, y, z) with dz = ½(x dy - y dx) and z(t_0) = z0.
pub fn horizontal_lift(curve: &SampledCurve, z0: f64) -> Result<SampledCurve> {
    if curve.dim() != 2 {
        return Err(Error::invalid(format!(
            "horizontal lift needs a planar curve, got dimension {}",
            curve.dim()
        )));
    }
    let mut acc = ExactSum::new();
    acc.add(z0);
    let mut coords = Vec::with_capacity(3 * curve.len());
    for i in 0..curve.len() {
        let p = curve.xy(i);
        if i > 0 {
            acc.add(lift_increment(curve.xy(i - 1), p));
        }
        coords.extend_from_slice(&[p[0], p[1], acc.value()]);
    }
    let closed = curve.is_closed() && coords[2] == coords[coords.len() - 1];
    SampledCurve::from_flat(curve.times().to_vec(), 3, coords, closed)
}

/// Signed area of a closed polygon, ½ Σ (x_i y_{i+1} - x_{i+1} y_i).
pub fn shoelace_area(curve: &SampledCurve) -> f64 {
    (0..curve.len() - 1)
        .map(|i| {
            let (a, b) = (curve.xy(i), curve.xy(i + 1));
            0.5 * (a[0] * b[1] - b[0] * a[1])
        })
        .collect::<ExactSum>()
        .value()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftingResiduals {
    /// ∫ x dz - ¾ ∫ x² dy
    pub r1: f64,
    /// ∫ y dz - ¾ ∫ x d(y²)
    pub r2: f64,
    pub x_dz: f64,
    pub x2_dy: f64,
    pub y_dz: f64,
    pub x_dy2: f64,
}

/// Checks ∫x dz = ¾∫x² dy and ∫y dz = ¾∫x d(y²) along a curve in R³ whose
/// planar projection is closed.
pub fn lifting_identity_residuals(curve: &SampledCurve) -> Result<LiftingResiduals> {
    if curve.dim() != 3 {
        return Err(Error::invalid(format!(
            "lifting identities need a curve in R^3, got dimension {}",
            curve.dim()
        )));
    }
    let last = curve.len() - 1;
    if curve.point(0)[..2] != curve.point(last)[..2] {
        return Err(Error::invalid("the planar projection of the curve must be closed"));
    }
    let t = curve.times().to_vec();
    let comp = |values: Vec<f64>| SampledFunction::new(t.clone(), values);
    let x = curve.component(0);
    let y = curve.component(1);
    let z = curve.component(2);
    let fx = comp(x.clone())?;
    let fy = comp(y.clone())?;
    let fz = comp(z)?;
    let fxx = comp(x.iter().map(|v| v * v).collect())?;
    let fyy = comp(y.iter().map(|v| v * v).collect())?;
    let x_dz = young_integral(&fx, &fz)?.value;
    let y_dz = young_integral(&fy, &fz)?.value;
    let x2_dy = young_integral(&fxx, &fy)?.value;
    let x_dy2 = young_integral(&fx, &fyy)?.value;
    Ok(LiftingResiduals {
        r1: x_dz - 0.75 * x2_dy,
        r2: y_dz - 0.75 * x_dy2,
        x_dz,
        x2_dy,
        y_dz,
        x_dy2,
    })
}

/// A square-sampled map into R³: a planar field plus a height grid.
#[derive(Clone, Debug, PartialEq)]
pub struct HeisenbergField {
    pub planar: SquareField,
    /// Row-major heights on the same lattice.
    pub z: Vec<f64>,
}

impl HeisenbergField {
    pub fn new(planar: SquareField, z: Vec<f64>) -> Result<Self> {
        let n = planar.points_per_side();
        if z.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} heights, got {}",
                n * n,
                z.len()
            )));
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite height"));
        }
        Ok(HeisenbergField { planar, z })
    }
}

/// Lattice points in boustrophedon order: row 0 left to right, row 1 right to
/// left, and so on.
pub fn boustrophedon(points_per_side: usize) -> Vec<(usize, usize)> {
    (0..points_per_side)
        .flat_map(|row| {
            (0..points_per_side).map(move |k| {
                let col = if row % 2 == 0 { k } else { points_per_side - 1 - k };
                (col, row)
            })
        })
        .collect()
}

/// Heights obtained by lifting the planar field along the boustrophedon path
/// starting at height `z0` in the lower-left corner.
pub fn lift_square_field(field: &SquareField, z0: f64) -> HeisenbergField {
    let n = field.points_per_side();
    let mut z = vec![0.0; n * n];
    let mut acc = ExactSum::new();
    acc.add(z0);
    let mut prev: Option<[f64; 2]> = None;
    for (col, row) in boustrophedon(n) {
        let p = field.value(col, row);
        if let Some(q) = prev {
            acc.add(lift_increment(q, p));
        }
        z[row * n + col] = acc.value();
        prev = Some(p);
    }
    HeisenbergField {
        planar: field.clone(),
        z,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareCheck {
    /// ⟨f dx∧dy⟩
    pub area_pairing: ConvergenceReport,
    /// ⟨f dx∧dz⟩ - (3/2)⟨x f dx∧dy⟩
    pub xz_residual: ConvergenceReport,
    /// ⟨f dy∧dz⟩ - (3/2)⟨y f dx∧dy⟩
    pub yz_residual: ConvergenceReport,
}

impl SquareCheck {
    /// Largest magnitude among the three best values.
    pub fn max_residual(&self) -> f64 {
        [&self.area_pairing, &self.xz_residual, &self.yz_residual]
            .iter()
            .map(|r| r.best().abs())
            .fold(0.0, f64::max)
    }
}

/// First-order dyadic pairings of a height field with the 2-forms dx∧dy,
/// dx∧dz, dy∧dz, arranged as residuals that vanish for horizontal maps.
pub fn heisenberg_square_check(
    field: &HeisenbergField,
    f: &(impl Fn([f64; 3]) -> f64 + Sync),
    rtol: f64,
) -> SquareCheck {
    let planar = &field.planar;
    let n = planar.points_per_side();
    let depth = planar.depth();
    let x = planar.phi1().values();
    let y = planar.phi2().values();
    let z = &field.z;
    let at = |k: usize| [x[k], y[k], z[k]];
    let weight = |k: usize| f(at(k));
    let x_weight = |k: usize| x[k] * f(at(k));
    let y_weight = |k: usize| y[k] * f(at(k));

    let (area, area_diag) = level_and_diagonal(depth, |level, step| {
        weighted_circulation(x, y, n, depth, level, step, &weight)
    });
    let (xz, xz_diag) = level_and_diagonal(depth, |level, step| {
        weighted_circulation(x, z, n, depth, level, step, &weight)
            - 1.5 * weighted_circulation(x, y, n, depth, level, step, &x_weight)
    });
    let (yz, yz_diag) = level_and_diagonal(depth, |level, step| {
        weighted_circulation(y, z, n, depth, level, step, &weight)
            - 1.5 * weighted_circulation(x, y, n, depth, level, step, &y_weight)
    });
    SquareCheck {
        area_pairing: ConvergenceReport::new(area, &area_diag, rtol),
        xz_residual: ConvergenceReport::new(xz, &xz_diag, rtol),
        yz_residual: ConvergenceReport::new(yz, &yz_diag, rtol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(cx: f64, n: usize, ccw: bool) -> SampledCurve {
        let s = if ccw { 1.0 } else { -1.0 };
        let pts: Vec<[f64; 2]> = (0..=n)
            .map(|k| {
                if k == 0 || k == n {
                    [cx + 1.0, 0.0]
                } else {
                    let a = s * 2.0 * PI * k as f64 / n as f64;
                    [cx + a.cos(), a.sin()]
                }
            })
            .collect();
        SampledCurve::planar((0..=n).map(|i| i as f64).collect(), &pts).unwrap()
    }

    #[test]
    fn koranyi_examples() {
        let o = HeisenbergPoint::new(0.0, 0.0, 0.0);
        assert_eq!(koranyi_distance(o, o), 0.0);
        assert_eq!(koranyi_distance(o, HeisenbergPoint::new(1.0, 0.0, 0.0)), 1.0);
        assert_eq!(koranyi_distance(o, HeisenbergPoint::new(0.0, 0.0, 1.0)), 2.0);
    }

    #[test]
    fn segment_lift_is_flat() {
        let c = SampledCurve::planar(vec![0.0, 1.0, 2.0], &[[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]]).unwrap();
        let l = horizontal_lift(&c, 0.25).unwrap();
        assert!(l.component(2).iter().all(|&z| z == 0.25));
    }

    #[test]
    fn circle_gains_its_area() {
        let ccw = horizontal_lift(&circle(0.0, 4096, true), 0.0).unwrap();
        let gain = ccw.point(ccw.len() - 1)[2];
        assert_eq!(gain, shoelace_area(&circle(0.0, 4096, true)));
        assert!((gain - PI).abs() < 2e-6);
        let cw = horizontal_lift(&circle(0.0, 4096, false), 0.0).unwrap();
        assert_eq!(cw.point(cw.len() - 1)[2], -gain);
    }

    #[test]
    fn lift_rejects_spatial_input() {
        let c = SampledCurve::new(vec![0.0, 1.0], vec![vec![0.0; 3]; 2], false).unwrap();
        assert!(horizontal_lift(&c, 0.0).is_err());
        assert!(lifting_identity_residuals(&circle(0.0, 8, true)).is_err());
    }

    #[test]
    fn residuals_on_lifted_circles() {
        let centred = lifting_identity_residuals(&horizontal_lift(&circle(0.0, 2048, true), 0.0).unwrap()).unwrap();
        assert!(centred.r1.abs() < 1e-6 && centred.x_dz.abs() < 1e-6);
        let shifted = lifting_identity_residuals(&horizontal_lift(&circle(1.0, 2048, true), 0.0).unwrap()).unwrap();
        assert!((shifted.x_dz - 1.5 * PI).abs() < 1e-4);
        assert!(shifted.r1.abs() < 1e-4);
    }

    #[test]
    fn boustrophedon_visits_every_point_once() {
        let path = boustrophedon(4);
        assert_eq!(path.len(), 16);
        assert_eq!(path[4], (3, 1));
        for w in path.windows(2) {
            let d = w[0].0.abs_diff(w[1].0) + w[0].1.abs_diff(w[1].1);
            assert_eq!(d, 1);
        }
    }

    #[test]
    fn degenerate_planar_field_has_vanishing_residuals() {
        // Image on a segment: no area anywhere, heights stay constant.
        let f = SquareField::from_fn([0.0, 0.0], 1.0, 4, |s, t| [s + t, 0.0]).unwrap();
        let h = lift_square_field(&f, 0.0);
        assert!(h.z.iter().all(|&z| z == 0.0));
        let check = heisenberg_square_check(&h, &|_| 1.0, 1e-9);
        assert!(check.max_residual() < 1e-14);
    }

    #[test]
    fn identity_square_is_detected() {
        let f = SquareField::from_fn([0.0, 0.0], 1.0, 5, |s, t| [s, t]).unwrap();
        let check = heisenberg_square_check(&lift_square_field(&f, 0.0), &|_| 1.0, 1e-9);
        assert!((check.area_pairing.best() - 1.0).abs() < 1e-12);
    }
}
