//! Principal-branch complex powers and radial branch-path monitoring.

use crate::error::{Error, Result};
use crate::real::{Real, C};

/// Number of samples taken along the radial path from 0 when monitoring a branch.
pub const BRANCH_PATH_STEPS: usize = 64;

#[inline]
fn on_cut<T: Real>(w: C<T>) -> bool {
    w.im == T::zero() && w.re <= T::zero()
}

fn cut_error<T: Real>(w: C<T>) -> Error {
    Error::BranchCut {
        re: w.re.to_f64().unwrap_or(f64::NAN),
        im: w.im.to_f64().unwrap_or(f64::NAN),
    }
}

/// exp(p * Log w) with the principal logarithm; `principal_power(1, p) = 1` for every p.
pub fn principal_power<T: Real>(w: C<T>, p: T) -> Result<C<T>> {
    if on_cut(w) {
        return Err(cut_error(w));
    }
    if w.re == T::one() && w.im == T::zero() {
        return Ok(C::new(T::one(), T::zero()));
    }
    Ok((w.ln() * p).exp())
}

/// Checks that `w_at(k/STEPS)` for k = 1..=STEPS stays off the closed negative real
/// axis and never jumps across it between consecutive samples. The path is expected
/// to start near the branch anchor at t -> 0.
pub fn monitor_branch_path<T: Real>(mut w_at: impl FnMut(T) -> Result<C<T>>) -> Result<()> {
    let mut prev: Option<C<T>> = None;
    for k in 1..=BRANCH_PATH_STEPS {
        let t = T::lit(k as f64 / BRANCH_PATH_STEPS as f64);
        let w = w_at(t)?;
        if on_cut(w) {
            return Err(cut_error(w));
        }
        if let Some(pw) = prev {
            if w.re < T::zero() && pw.re < T::zero() && (w.im > T::zero()) != (pw.im > T::zero()) {
                return Err(cut_error(w));
            }
        }
        prev = Some(w);
    }
    Ok(())
}
