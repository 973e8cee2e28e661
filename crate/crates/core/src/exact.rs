//! Exact floating-point accumulation.
//!
//! [`ExactSum`] keeps a non-overlapping expansion of the running total
//! (Shewchuk's partials), so the represented sum is exact and independent of
//! insertion order. [`ExactSum::value`] returns the correctly rounded result.
//! Two accumulators whose multisets of addends have the same exact total
//! therefore round to the same bits, which is what makes dyadic boundary
//! integrals telescope bitwise.

#[derive(Clone, Debug, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut x: f64) {
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    /// Adds the exact product `a * b`.
    pub fn add_product(&mut self, a: f64, b: f64) {
        let (p, e) = two_product(a, b);
        self.add(p);
        self.add(e);
    }

    /// Adds the exact product `a * b * c`.
    pub fn add_product3(&mut self, a: f64, b: f64, c: f64) {
        let (p, e) = two_product(a, b);
        self.add_product(p, c);
        self.add_product(e, c);
    }

    /// Adds `scale` times the exact value of `other`.
    pub fn add_scaled(&mut self, other: &ExactSum, scale: f64) {
        for &p in &other.partials {
            self.add_product(p, scale);
        }
    }

    pub fn merge(&mut self, other: &ExactSum) {
        for &p in &other.partials {
            self.add(p);
        }
    }

    pub fn negated(&self) -> ExactSum {
        ExactSum {
            partials: self.partials.iter().map(|p| -p).collect(),
        }
    }

    /// Correctly rounded value of the exact sum (round-half-even).
    pub fn value(&self) -> f64 {
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        // Ties: the remaining partials decide which way a half-way case rounds.
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

impl Extend<f64> for ExactSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for ExactSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = ExactSum::new();
        s.extend(iter);
        s
    }
}

/// `(p, e)` with `p = fl(a * b)` and `p + e = a * b` exactly, barring underflow.
pub fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Correctly rounded sum of a slice.
pub fn exact_sum(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<ExactSum>().value()
}
