use std::f64::consts::PI;

use crate::curve::{variation_profile, Modulus};
use crate::error::{Error, Result};
use crate::tree::quotient::QuotientTree;

/// Classes along `[p, q]` with their cumulative σ-variation from `p`, measured
/// in the arc metric.
pub fn arc_parameterization(
    tree: &QuotientTree,
    p: usize,
    q: usize,
    sigma: &Modulus,
) -> Result<(Vec<usize>, Vec<f64>)> {
    check_class(tree, p)?;
    check_class(tree, q)?;
    let arc = tree.arc(p, q);
    let profile = variation_profile(arc.len(), |i, j| tree.d_t(arc[i], arc[j]), sigma)?;
    Ok((arc, profile))
}

/// π_p(q, t): the first class on `[p, q]` whose variation from `p` reaches
/// `min(t, V(q))`.
pub fn contraction(tree: &QuotientTree, p: usize, q: usize, t: f64, sigma: &Modulus) -> Result<usize> {
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("contraction time must be non-negative, got {t}")));
    }
    let (arc, profile) = arc_parameterization(tree, p, q, sigma)?;
    let total = profile[profile.len() - 1];
    let target = t.min(total);
    let k = profile.iter().position(|&v| v >= target).unwrap_or(arc.len() - 1);
    Ok(arc[k])
}

fn check_class(tree: &QuotientTree, c: usize) -> Result<()> {
    if c >= tree.class_count() {
        return Err(Error::invalid(format!("class {c} out of range")));
    }
    Ok(())
}

/// Extension of a boundary loop in the tree to the closed unit disk by coning
/// toward the image of the first boundary sample.
#[derive(Debug)]
pub struct ConeExtension<'a> {
    tree: &'a QuotientTree,
    boundary: Vec<usize>,
    sigma: Modulus,
    radius: f64,
    violations: usize,
}

impl<'a> ConeExtension<'a> {
    /// `boundary[k]` is the class at angle `2πk / n`. Sample pairs breaking
    /// `d_T(f(s), f(s')) ≤ σ(L |s - s'|)` are counted, not rejected.
    pub fn new(
        tree: &'a QuotientTree,
        boundary: Vec<usize>,
        lipschitz: f64,
        sigma: Modulus,
    ) -> Result<Self> {
        if boundary.is_empty() {
            return Err(Error::invalid("boundary assignment is empty"));
        }
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(Error::invalid(format!("Lipschitz constant must be positive, got {lipschitz}")));
        }
        for &c in &boundary {
            check_class(tree, c)?;
        }
        let n = boundary.len();
        let step = 2.0 * PI / n as f64;
        let mut violations = 0;
        for i in 0..n {
            for j in i + 1..n {
                let gap = (j - i).min(n - (j - i)) as f64 * step;
                let bound = match sigma.eval(lipschitz * gap) {
                    Ok(b) => b,
                    Err(Error::ModulusRange { .. }) => f64::INFINITY,
                    Err(e) => return Err(e),
                };
                if tree.d_t(boundary[i], boundary[j]) > bound {
                    violations += 1;
                }
            }
        }
        Ok(ConeExtension {
            tree,
            boundary,
            sigma,
            radius: lipschitz * PI,
            violations,
        })
    }

    /// Number of boundary sample pairs violating the modulus bound.
    pub fn violations(&self) -> usize {
        self.violations
    }

    pub fn apex(&self) -> usize {
        self.boundary[0]
    }

    /// Class at boundary sample `k`.
    pub fn boundary(&self, k: usize) -> usize {
        self.boundary[k]
    }

    /// F(x) = π_p(f(x/|x|), R max{0, 2|x| - 1}) with the angle snapped to the
    /// nearest boundary sample.
    pub fn eval(&self, x: [f64; 2]) -> Result<usize> {
        let r = x[0].hypot(x[1]);
        if !(r <= 1.0) {
            return Err(Error::invalid(format!("point {x:?} outside the unit disk")));
        }
        if r <= 0.5 {
            return Ok(self.apex());
        }
        let n = self.boundary.len();
        let angle = x[1].atan2(x[0]).rem_euclid(2.0 * PI);
        let k = (angle / (2.0 * PI) * n as f64).round() as usize % n;
        contraction(self.tree, self.apex(), self.boundary[k], self.radius * (2.0 * r - 1.0), &self.sigma)
    }
}
