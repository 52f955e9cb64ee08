//! Order-independent floating point summation.
//!
//! [`ExactSum`] keeps a sum of `f64` values as a list of non-overlapping
//! partials (Shewchuk's algorithm), so the represented value is the exact
//! real sum of everything added. Two sums built from the same multiset of
//! terms compare equal no matter how the terms were grouped, which lets the
//! sequential merge and the distributed emulation reach identical decisions.

use std::cmp::Ordering;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExactSum {
    // Non-overlapping, increasing in magnitude.
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut x: f64) {
        let mut i = 0;
        for k in 0..self.partials.len() {
            let mut y = self.partials[k];
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

    /// Adds every term of `other`; the result is the exact sum of both.
    pub fn absorb(&mut self, other: &ExactSum) {
        for &p in &other.partials {
            self.add(p);
        }
    }

    pub fn combined(&self, other: &ExactSum) -> ExactSum {
        let mut out = self.clone();
        out.absorb(other);
        out
    }

    /// Sign of the exact sum.
    pub fn signum(&self) -> Ordering {
        match self.partials.iter().rev().find(|p| **p != 0.0) {
            Some(p) if *p > 0.0 => Ordering::Greater,
            Some(_) => Ordering::Less,
            None => Ordering::Equal,
        }
    }

    /// Exact comparison of the two represented real numbers.
    pub fn cmp_exact(&self, other: &ExactSum) -> Ordering {
        let mut diff = self.clone();
        for &p in &other.partials {
            diff.add(-p);
        }
        diff.signum()
    }

    /// The exact sum rounded to the nearest `f64` (ties to even).
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
        // Half-way case: round toward the side the remaining partials lean to.
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

impl FromIterator<f64> for ExactSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = ExactSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Correctly rounded sum of `values`.
pub fn exact_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<ExactSum>().value()
}
