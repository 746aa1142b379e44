//! Bracketed scalar root finding.

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

const MAX_ITER: usize = 400;

/// Finds a root of `f` inside `[lo, hi]`, where `f(lo)` and `f(hi)` have
/// opposite signs (or one of them is zero).
///
/// Illinois-style false position steps with a bisection step whenever three
/// consecutive iterations fail to halve the bracket. Stops once the bracket
/// is narrower than `x_tol * max(1, |x|)`.
pub fn find_root<T: Scalar, F: Fn(T) -> T>(f: F, lo: T, hi: T, x_tol: T) -> Result<T> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoConvergence(format!(
            "no sign change on [{a:e}, {b:e}]: f = {fa:e}, {fb:e}"
        )));
    }
    let half = lit::<T>(0.5);
    let mut last_kept: i8 = 0;
    let mut width_checkpoint = b - a;
    for iter in 0..MAX_ITER {
        let width = b - a;
        let scale = T::one().max(a.abs()).max(b.abs());
        if width <= x_tol * scale {
            break;
        }
        let bisect_now = iter % 3 == 2 && width > half * width_checkpoint;
        if iter % 3 == 2 {
            width_checkpoint = width;
        }
        let mut x = if bisect_now {
            (a + b) * half
        } else {
            (a * fb - b * fa) / (fb - fa)
        };
        if !(x > a && x < b) {
            x = (a + b) * half;
        }
        let fx = f(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if last_kept == 1 {
                fb = fb * half;
            }
            last_kept = 1;
        } else {
            b = x;
            fb = fx;
            if last_kept == -1 {
                fa = fa * half;
            }
            last_kept = -1;
        }
    }
    Ok((a + b) * half)
}

/// Doubles the distance of `hi` from `lo` until `f(hi) > 0`, for an
/// increasing `f` with `f(lo) <= 0`. Returns the final `hi`.
pub fn expand_upper_bracket<T: Scalar, F: Fn(T) -> T>(f: F, lo: T, hi: T) -> Result<T> {
    let mut step = hi - lo;
    let mut hi = hi;
    for _ in 0..2000 {
        if f(hi) > T::zero() {
            return Ok(hi);
        }
        step = step + step;
        hi = lo + step;
        if !hi.is_finite() {
            break;
        }
    }
    Err(Error::NoConvergence("could not bracket root from above".into()))
}
