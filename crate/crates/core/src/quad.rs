//! Adaptive Simpson quadrature for smooth integrands with a filled-in
//! removable endpoint value.

use crate::error::{Error, Result};
use crate::real::Real;

/// Maximum bisection depth before the refinement is declared failed.
pub const QUAD_MAX_DEPTH: usize = 20;

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<T: Real>(
    f: &dyn Fn(T) -> T,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: usize,
) -> Result<T> {
    let m = (a + b) * T::half();
    let lm = (a + m) * T::half();
    let rm = (m + b) * T::half();
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= T::lit(15.0) * tol {
        return Ok(left + right + delta / T::lit(15.0));
    }
    if depth == 0 {
        return Err(Error::QuadratureFailure {
            max_depth: QUAD_MAX_DEPTH,
        });
    }
    let half_tol = tol * T::half();
    Ok(refine(f, a, m, fa, flm, fm, left, half_tol, depth - 1)?
        + refine(f, m, b, fm, frm, fb, right, half_tol, depth - 1)?)
}

/// Integrates `f` over [a, b] to the given absolute tolerance.
pub fn adaptive_simpson<T: Real>(f: &dyn Fn(T) -> T, a: T, b: T, abs_tol: T) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    let fa = f(a);
    let fb = f(b);
    let m = (a + b) * T::half();
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    refine(f, a, b, fa, fm, fb, whole, abs_tol, QUAD_MAX_DEPTH)
}
