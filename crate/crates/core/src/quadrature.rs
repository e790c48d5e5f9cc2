//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_DEPTH: u32 = 40;

/// `∫_a^b f` to absolute tolerance `tol` by recursive interval bisection.
///
/// Subintervals that reach `max_depth` contribute their Richardson-corrected
/// estimate as is. A non-finite integrand value is a domain error.
pub fn adaptive_simpson<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T, max_depth: u32) -> Result<T> {
    let fa = eval(&f, a)?;
    let fb = eval(&f, b)?;
    let m = (a + b) / T::two();
    let fm = eval(&f, m)?;
    let whole = simpson(a, b, fa, fm, fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, max_depth)
}

/// [`adaptive_simpson`] with tolerance `1e-10` and depth 40.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T) -> Result<T> {
    adaptive_simpson(f, a, b, T::of_f64(DEFAULT_TOLERANCE), DEFAULT_MAX_DEPTH)
}

fn eval<T: Real, F: Fn(T) -> T>(f: &F, x: T) -> Result<T> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::Domain(format!("integrand is not finite at {x}")))
    }
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::of_usize(6) * (fa + T::of_usize(4) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: u32) -> Result<T> {
    let m = (a + b) / T::two();
    let lm = (a + m) / T::two();
    let rm = (m + b) / T::two();
    let flm = eval(f, lm)?;
    let frm = eval(f, rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let fifteen = T::of_usize(15);
    if depth == 0 || delta.abs() <= fifteen * tol {
        return Ok(left + right + delta / fifteen);
    }
    let half = tol / T::two();
    Ok(recurse(f, a, m, fa, flm, fm, left, half, depth - 1)? + recurse(f, m, b, fm, frm, fb, right, half, depth - 1)?)
}
