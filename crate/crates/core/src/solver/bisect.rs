use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An interval `[lo, hi]` with `f(lo) > 0 ≥ f(hi)` enclosing a zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
}

impl Enclosure {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Bisection for a decreasing `f` with `f(a) > 0 > f(b)`.
pub fn bisect_zero<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Enclosure> {
    if !(tol > 0.0) || !(a < b) {
        return Err(Error::invalid(format!(
            "bisection needs a < b and tol > 0, got [{a}, {b}], tol {tol}"
        )));
    }
    let (fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(Enclosure { lo: a, hi: a });
    }
    if fb == 0.0 {
        return Ok(Enclosure { lo: b, hi: b });
    }
    if !(fa > 0.0 && fb < 0.0) {
        return Err(Error::NoSignChange { a, b, fa, fb });
    }
    let (mut lo, mut hi) = (a, b);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(Enclosure { lo: mid, hi: mid });
        }
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Enclosure { lo, hi })
}
