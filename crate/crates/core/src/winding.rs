//! Winding numbers of closed planar polygons and their moment integrals.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::young::{young_integral, SampledFunction};

/// Angle sums farther than this from a multiple of 2π are reported as undefined.
pub const ANGLE_TOLERANCE: f64 = 0.1;

struct Segments {
    starts: Vec<[f64; 2]>,
    ends: Vec<[f64; 2]>,
}

impl Segments {
    fn of(curve: &SampledCurve) -> Result<Self> {
        if curve.dim() != 2 {
            return Err(Error::invalid(format!(
                "winding numbers need a planar curve, got dimension {}",
                curve.dim()
            )));
        }
        if !curve.is_closed() {
            return Err(Error::invalid("winding numbers need a closed curve"));
        }
        let n = curve.len();
        Ok(Segments {
            starts: (0..n - 1).map(|i| curve.xy(i)).collect(),
            ends: (1..n).map(|i| curve.xy(i)).collect(),
        })
    }

    fn winding_at(&self, q: [f64; 2], guard: f64) -> Option<i32> {
        let mut total = 0.0;
        for (a, b) in self.starts.iter().zip(&self.ends) {
            let u = [a[0] - q[0], a[1] - q[1]];
            let v = [b[0] - q[0], b[1] - q[1]];
            if segment_distance(u, v) < guard || (u == [0.0, 0.0]) {
                return None;
            }
            let cross = u[0] * v[1] - u[1] * v[0];
            let dot = u[0] * v[0] + u[1] * v[1];
            total += cross.atan2(dot);
        }
        let turns = total / (2.0 * PI);
        let rounded = turns.round();
        if ((turns - rounded) * 2.0 * PI).abs() > ANGLE_TOLERANCE {
            return None;
        }
        Some(rounded as i32)
    }
}

/// Distance from the origin to the segment `[u, v]`.
fn segment_distance(u: [f64; 2], v: [f64; 2]) -> f64 {
    let d = [v[0] - u[0], v[1] - u[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let s = if len2 > 0.0 {
        (-(u[0] * d[0] + u[1] * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (u[0] + s * d[0]).hypot(u[1] + s * d[1])
}

/// Winding number of a closed planar curve around `q` by angle summation, or
/// `None` when `q` lies within `guard` of the curve or the angle sum is not
/// close to a whole number of turns.
pub fn winding_number(curve: &SampledCurve, q: [f64; 2], guard: f64) -> Result<Option<i32>> {
    Ok(Segments::of(curve)?.winding_at(q, guard))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingField {
    pub origin: [f64; 2],
    pub cell: f64,
    pub ncols: usize,
    pub nrows: usize,
    /// Row-major; 0 where undefined.
    pub values: Vec<i32>,
    pub defined: Vec<bool>,
}

impl WindingField {
    pub fn center(&self, col: usize, row: usize) -> [f64; 2] {
        [
            self.origin[0] + (col as f64 + 0.5) * self.cell,
            self.origin[1] + (row as f64 + 0.5) * self.cell,
        ]
    }

    pub fn value(&self, col: usize, row: usize) -> i32 {
        self.values[row * self.ncols + col]
    }

    pub fn is_defined(&self, col: usize, row: usize) -> bool {
        self.defined[row * self.ncols + col]
    }

    pub fn masked_area(&self) -> f64 {
        self.defined.iter().filter(|d| !**d).count() as f64 * self.cell * self.cell
    }

    /// Nearest cell containing `q`, if inside the grid.
    pub fn locate(&self, q: [f64; 2]) -> Option<(usize, usize)> {
        let c = ((q[0] - self.origin[0]) / self.cell).floor();
        let r = ((q[1] - self.origin[1]) / self.cell).floor();
        (c >= 0.0 && r >= 0.0 && (c as usize) < self.ncols && (r as usize) < self.nrows)
            .then_some((c as usize, r as usize))
    }
}

/// Winding numbers at cell centres over the curve's bounding box grown by one
/// cell on every side. The guard radius defaults to `cell / 2`.
pub fn winding_field(curve: &SampledCurve, cell: f64) -> Result<WindingField> {
    winding_field_with_guard(curve, cell, cell / 2.0)
}

pub fn winding_field_with_guard(curve: &SampledCurve, cell: f64, guard: f64) -> Result<WindingField> {
    if !(cell > 0.0 && cell.is_finite()) {
        return Err(Error::invalid(format!("cell must be positive, got {cell}")));
    }
    if !(guard >= 0.0) {
        return Err(Error::invalid(format!("guard must be non-negative, got {guard}")));
    }
    let segs = Segments::of(curve)?;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in curve.points() {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let origin = [lo[0] - cell, lo[1] - cell];
    let ncols = ((hi[0] - lo[0]) / cell).ceil() as usize + 2;
    let nrows = ((hi[1] - lo[1]) / cell).ceil() as usize + 2;
    if ncols.saturating_mul(nrows) > 100_000_000 {
        return Err(Error::invalid(format!(
            "a {ncols} x {nrows} winding grid is too large; increase the cell size"
        )));
    }
    let mut field = WindingField {
        origin,
        cell,
        ncols,
        nrows,
        values: Vec::new(),
        defined: Vec::new(),
    };
    let cells: Vec<Option<i32>> = (0..nrows)
        .into_par_iter()
        .flat_map_iter(|row| {
            let field = &field;
            let segs = &segs;
            (0..ncols).map(move |col| segs.winding_at(field.center(col, row), guard))
        })
        .collect();
    field.values = cells.iter().map(|w| w.unwrap_or(0)).collect();
    field.defined = cells.iter().map(Option::is_some).collect();
    Ok(field)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingMoments {
    pub m00: f64,
    pub m10: f64,
    pub m01: f64,
    pub pos_mass: f64,
    pub neg_mass: f64,
    pub pos_center: Option<[f64; 2]>,
    pub neg_center: Option<[f64; 2]>,
    pub masked_area: f64,
    /// Quadrature error bounds for `m00`, `m10`, `m01` coming from the masked
    /// cells, taking the largest defined |w| as the bound on the integrand.
    pub m00_budget: f64,
    pub m10_budget: f64,
    pub m01_budget: f64,
}

impl WindingMoments {
    /// True if each moment is within its budget plus `tol`.
    pub fn vanish(&self, tol: f64) -> bool {
        self.m00.abs() <= self.m00_budget + tol
            && self.m10.abs() <= self.m10_budget + tol
            && self.m01.abs() <= self.m01_budget + tol
    }
}

/// Midpoint-rule moments ∫w, ∫q_x w, ∫q_y w over the defined cells.
pub fn winding_moments(field: &WindingField) -> WindingMoments {
    let area = field.cell * field.cell;
    let (mut s0, mut sx, mut sy) = (0.0, 0.0, 0.0);
    let (mut pos, mut pos_x, mut pos_y) = (0.0, 0.0, 0.0);
    let (mut neg, mut neg_x, mut neg_y) = (0.0, 0.0, 0.0);
    let (mut masked, mut masked_x, mut masked_y) = (0.0, 0.0, 0.0);
    let mut w_max = 0i32;
    for row in 0..field.nrows {
        for col in 0..field.ncols {
            let [x, y] = field.center(col, row);
            if !field.is_defined(col, row) {
                masked += 1.0;
                masked_x += x.abs();
                masked_y += y.abs();
                continue;
            }
            let w = field.value(col, row);
            w_max = w_max.max(w.abs());
            let wf = f64::from(w);
            s0 += wf;
            sx += x * wf;
            sy += y * wf;
            if w > 0 {
                pos += wf;
                pos_x += x * wf;
                pos_y += y * wf;
            } else if w < 0 {
                neg -= wf;
                neg_x -= x * wf;
                neg_y -= y * wf;
            }
        }
    }
    let w_max = f64::from(w_max);
    WindingMoments {
        m00: s0 * area,
        m10: sx * area,
        m01: sy * area,
        pos_mass: pos * area,
        neg_mass: neg * area,
        pos_center: (pos > 0.0).then(|| [pos_x / pos, pos_y / pos]),
        neg_center: (neg > 0.0).then(|| [neg_x / neg, neg_y / neg]),
        masked_area: masked * area,
        m00_budget: w_max * masked * area,
        m10_budget: w_max * masked_x * area,
        m01_budget: w_max * masked_y * area,
    }
}

/// ∮ g1∘γ d(g2∘γ) around a closed planar curve, which equals ∫ w_γ det Dg.
pub fn current_pairing(
    curve: &SampledCurve,
    g1: impl Fn([f64; 2]) -> f64,
    g2: impl Fn([f64; 2]) -> f64,
) -> Result<f64> {
    Segments::of(curve)?;
    let pts: Vec<[f64; 2]> = (0..curve.len()).map(|i| curve.xy(i)).collect();
    let f = SampledFunction::new(curve.times().to_vec(), pts.iter().map(|&p| g1(p)).collect())?;
    let g = SampledFunction::new(curve.times().to_vec(), pts.iter().map(|&p| g2(p)).collect())?;
    Ok(young_integral(&f, &g)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(cx: f64, cy: f64, r: f64, n: usize, turns: usize) -> SampledCurve {
        let pts: Vec<[f64; 2]> = (0..=n * turns)
            .map(|k| {
                if k % n == 0 {
                    [cx + r, cy]
                } else {
                    let a = 2.0 * PI * k as f64 / n as f64;
                    [cx + r * a.cos(), cy + r * a.sin()]
                }
            })
            .collect();
        SampledCurve::planar((0..pts.len()).map(|i| i as f64).collect(), &pts).unwrap()
    }

    #[test]
    fn circle_inside_and_outside() {
        let c = circle(0.0, 0.0, 1.0, 256, 1);
        assert_eq!(winding_number(&c, [0.0, 0.0], 0.01).unwrap(), Some(1));
        assert_eq!(winding_number(&c, [3.0, 0.0], 0.01).unwrap(), Some(0));
        assert_eq!(winding_number(&c, [1.0, 0.0], 0.01).unwrap(), None);
        assert_eq!(winding_number(&c.reversed(), [0.2, 0.1], 0.01).unwrap(), Some(-1));
    }

    #[test]
    fn open_or_spatial_curves_rejected() {
        let open = SampledCurve::planar(vec![0.0, 1.0, 2.0], &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!(winding_number(&open, [0.2, 0.2], 0.0).is_err());
        let spatial = SampledCurve::new(vec![0.0, 1.0], vec![vec![0.0; 3]; 2], true).unwrap();
        assert!(winding_field(&spatial, 0.1).is_err());
    }

    #[test]
    fn constant_curve_gives_zero_field() {
        let c = SampledCurve::planar(vec![0.0, 1.0, 2.0], &[[0.5, 0.5]; 3]).unwrap();
        let f = winding_field(&c, 0.1).unwrap();
        assert!(f.values.iter().all(|&w| w == 0));
        let m = winding_moments(&f);
        assert_eq!((m.m00, m.m10, m.m01), (0.0, 0.0, 0.0));
        assert!(m.pos_center.is_none() && m.neg_center.is_none());
    }

    #[test]
    fn disk_moments_within_budget() {
        let c = circle(0.5, -0.25, 1.0, 512, 1);
        let m = winding_moments(&winding_field(&c, 0.02).unwrap());
        assert!((m.m00 - PI).abs() <= m.m00_budget);
        assert!((m.m10 - 0.5 * PI).abs() <= m.m10_budget);
        assert!((m.m01 + 0.25 * PI).abs() <= m.m01_budget);
        assert!((m.m00 - (m.pos_mass - m.neg_mass)).abs() < 1e-12);
        let pc = m.pos_center.unwrap();
        assert!((pc[0] - 0.5).abs() < 0.01 && (pc[1] + 0.25).abs() < 0.01);
    }

    #[test]
    fn reversal_negates_exactly() {
        let c = circle(0.1, 0.2, 1.0, 200, 1);
        let f = winding_field(&c, 0.05).unwrap();
        let r = winding_field(&c.reversed(), 0.05).unwrap();
        assert_eq!(f.defined, r.defined);
        assert!(f.values.iter().zip(&r.values).all(|(a, b)| *a == -b));
        let (m, n) = (winding_moments(&f), winding_moments(&r));
        assert_eq!(m.m00, -n.m00);
        assert_eq!(m.m10, -n.m10);
        assert_eq!(m.m01, -n.m01);
    }

    #[test]
    fn pairing_with_identity_is_area() {
        let c = circle(0.0, 0.0, 2.0, 1024, 1);
        let area = current_pairing(&c, |p| p[0], |p| p[1]).unwrap();
        assert!((area - 4.0 * PI).abs() < 1e-3);
        assert!(current_pairing(&c, |_| 3.0, |p| p[1]).unwrap().abs() < 1e-12);
    }
}
