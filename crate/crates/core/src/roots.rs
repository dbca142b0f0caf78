//! Bracketed bisection used by every root in the crate.
//!
//! All the equations solved here come with a bracket on which the residual
//! changes sign, so bisection is both sufficient and predictable.

use crate::error::{Error, Result};

/// Residual level at which the search stops early.
pub const RESIDUAL_TOL: f64 = 1e-12;
/// Iteration cap.
pub const MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// `|h(x)|` at the returned point.
    pub residual: f64,
    pub iterations: usize,
}

/// Finds a zero of `h` on `[lo, hi]`.
///
/// The endpoints must straddle zero (a zero residual at either end counts).
/// Iteration continues past [`RESIDUAL_TOL`] only while the bracket can still
/// shrink, so the returned point is accurate to the last representable
/// digit whenever the residual is flat near the root.
pub fn bisect<F>(mut h: F, lo: f64, hi: f64, context: &str) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::Bracket(format!("{context}: bad interval [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut ha = h(a);
    let hb = h(b);
    if ha == 0.0 {
        return Ok(Root { x: a, residual: 0.0, iterations: 0 });
    }
    if hb == 0.0 {
        return Ok(Root { x: b, residual: 0.0, iterations: 0 });
    }
    if ha.is_nan() || hb.is_nan() || ha.signum() == hb.signum() {
        return Err(Error::Bracket(format!(
            "{context}: h({a}) = {ha} and h({b}) = {hb} do not straddle zero"
        )));
    }

    let mut best = if ha.abs() < hb.abs() { (a, ha.abs()) } else { (b, hb.abs()) };
    for it in 1..=MAX_ITER {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return Ok(Root { x: best.0, residual: best.1, iterations: it });
        }
        let hm = h(mid);
        if hm.abs() < best.1 {
            best = (mid, hm.abs());
        }
        if hm == 0.0 {
            return Ok(Root { x: mid, residual: 0.0, iterations: it });
        }
        if hm.signum() == ha.signum() {
            a = mid;
            ha = hm;
        } else {
            b = mid;
        }
    }
    Ok(Root { x: best.0, residual: best.1, iterations: MAX_ITER })
}
