//! Scalar root finding by bisection.
//!
//! Bisection is deliberately preferred over faster methods throughout this
//! crate: every inverse problem here is monotone on its physical branch, and
//! determinism matters more than iteration count.

use crate::error::{Error, Result};

/// Root of `f` in `[lo, hi]` to absolute x-tolerance `tol_x`.
///
/// `f(lo)` and `f(hi)` must differ in sign; otherwise a no-solution error
/// carrying the bracket and both endpoint values is returned. `what` names
/// the quantity being solved for in that diagnostic.
pub fn bisect<F>(f: F, lo: f64, hi: f64, tol_x: f64, what: &str) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain(format!(
            "bisection bracket must satisfy lo < hi, got [{lo:e}, {hi:e}]"
        )));
    }
    if !(tol_x > 0.0) {
        return Err(Error::domain(format!("tol_x must be > 0, got {tol_x:e}")));
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSolution { what: what.to_string(), lo, hi, f_lo, f_hi });
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = f_lo;
    while hi - lo > tol_x {
        let mid = 0.5 * (lo + hi);
        // spacing exhausted: mid no longer separates the endpoints
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
