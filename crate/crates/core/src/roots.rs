//! Bracketed scalar root finding: regula falsi steps with the Illinois
//! modification, falling back to bisection whenever the bracket stops
//! shrinking fast enough.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Stop once `|f(x)| <= f_tol`.
    pub f_tol: f64,
    /// Stop once the bracket is narrower than `x_tol`.
    pub x_tol: f64,
    pub max_iterations: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            f_tol: 1e-12,
            x_tol: 0.0,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// `f(x)` at the returned point.
    pub residual: f64,
    pub iterations: usize,
}

/// Finds a root of `f` in `[lo, hi]` given the function values at both ends,
/// which must have opposite signs (or one of them be zero).
///
/// Returns the best point seen; callers decide whether `residual` is good
/// enough.
pub fn solve_bracketed<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
    mut f_hi: f64,
    opts: &RootOptions,
) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) {
        return Err(Error::InvalidInput(format!("empty bracket [{lo}, {hi}]")));
    }
    if f_lo.signum() == f_hi.signum() && f_lo != 0.0 && f_hi != 0.0 {
        return Err(Error::InvalidInput(format!(
            "no sign change on [{lo}, {hi}]: f = {f_lo}, {f_hi}"
        )));
    }

    let best = |lo: f64, hi: f64, f_lo: f64, f_hi: f64, it: usize| {
        if f_lo.abs() <= f_hi.abs() {
            Root {
                x: lo,
                residual: f_lo,
                iterations: it,
            }
        } else {
            Root {
                x: hi,
                residual: f_hi,
                iterations: it,
            }
        }
    };

    // Illinois-scaled copies of f_lo / f_hi used only for the secant step.
    let (mut g_lo, mut g_hi) = (f_lo, f_hi);
    // Which end was retained on the previous step: -1 lo, +1 hi.
    let mut retained = 0i8;
    let mut width_before = hi - lo;

    for it in 0..opts.max_iterations {
        if f_lo.abs() <= opts.f_tol || f_hi.abs() <= opts.f_tol || hi - lo <= opts.x_tol {
            return Ok(best(lo, hi, f_lo, f_hi, it));
        }

        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            return Ok(best(lo, hi, f_lo, f_hi, it));
        }

        // Bisect every third step unless the bracket has halved in the meantime.
        let force_bisect = it % 3 == 2 && (hi - lo) > 0.5 * width_before;
        if it % 3 == 2 {
            width_before = hi - lo;
        }

        let secant = hi - g_hi * (hi - lo) / (g_hi - g_lo);
        let x = if force_bisect || !(secant > lo && secant < hi) {
            mid
        } else {
            secant
        };

        let fx = f(x)?;
        if !fx.is_finite() {
            return Err(Error::InvalidInput(format!("root function returned {fx} at {x}")));
        }
        if fx == 0.0 {
            return Ok(Root {
                x,
                residual: 0.0,
                iterations: it + 1,
            });
        }

        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
            g_lo = fx;
            if retained == 1 {
                g_hi *= 0.5;
            }
            retained = 1;
        } else {
            hi = x;
            f_hi = fx;
            g_hi = fx;
            if retained == -1 {
                g_lo *= 0.5;
            }
            retained = -1;
        }
    }
    Ok(best(lo, hi, f_lo, f_hi, opts.max_iterations))
}
