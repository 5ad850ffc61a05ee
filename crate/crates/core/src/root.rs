//! Bracketed scalar root finding.
//!
//! Illinois-modified regula falsi, falling back to a bisection step whenever
//! two consecutive steps fail to halve the bracket.

use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerance {
    /// Stop once `|f(x)|` is at or below this.
    pub f_abs: f64,
    /// Stop once the bracket is narrower than this.
    pub x_width: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Root {
    pub x: f64,
}

pub(crate) fn find_root<F>(mut f: F, lower: f64, upper: f64, tol: Tolerance) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lower, upper);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(Root { x: a });
    }
    if fb == 0.0 {
        return Ok(Root { x: b });
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::NoRoot {
            lower,
            upper,
            f_lower: fa,
            f_upper: fb,
        });
    }

    // Which end was kept on the previous step: -1 = a, 1 = b, 0 = none.
    let mut kept = 0i8;
    let mut width = b - a;
    let mut slow_steps = 0;
    for _ in 0..tol.max_iter {
        let x = if slow_steps >= 2 {
            slow_steps = 0;
            0.5 * (a + b)
        } else {
            let secant = (a * fb - b * fa) / (fb - fa);
            if secant > a && secant < b {
                secant
            } else {
                0.5 * (a + b)
            }
        };
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::NonConvergence {
                iterations: tol.max_iter,
            });
        }
        if fx.abs() <= tol.f_abs {
            return Ok(Root { x });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if kept == 1 {
                fb *= 0.5;
            }
            kept = 1;
        } else {
            b = x;
            fb = fx;
            if kept == -1 {
                fa *= 0.5;
            }
            kept = -1;
        }
        let new_width = b - a;
        if new_width > 0.5 * width {
            slow_steps += 1;
        } else {
            slow_steps = 0;
        }
        width = new_width;
        if width < tol.x_width {
            // Report the end with the smaller residual magnitude.
            return Ok(if fa.abs() < fb.abs() {
                Root { x: a }
            } else {
                Root { x: b }
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: tol.max_iter,
    })
}
