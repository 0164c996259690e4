//! Bracketed bisection for monotone functions.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bisection {
    /// Midpoint of the final bracket.
    pub root: f64,
    pub iterations: usize,
    /// Final bracket (lo, hi) with f(lo) and f(hi) of opposite sign.
    pub bracket: (f64, f64),
}

/// Bisects `f` on `[lo, hi]` until the bracket is narrower than `tol` or
/// `max_iter` halvings have been done. The caller guarantees that `f(lo)` and
/// `f(hi)` have opposite signs; a point where `f` is exactly zero is returned
/// as-is.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Bisection
where
    F: FnMut(f64) -> f64,
{
    let lo_positive = f(lo) > 0.0;
    let mut iterations = 0;
    while hi - lo > tol && iterations < max_iter {
        let mid = 0.5 * (lo + hi);
        let value = f(mid);
        iterations += 1;
        if value == 0.0 {
            return Bisection {
                root: mid,
                iterations,
                bracket: (mid, mid),
            };
        }
        if (value > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Bisection {
        root: 0.5 * (lo + hi),
        iterations,
        bracket: (lo, hi),
    }
}
