//! Bisection/secant hybrid root finding for monotone functions.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Solve g(x) = target for monotone `g` on `bracket`.
///
/// The bracket endpoints must enclose the target value. Succeeds when
/// |g(x) − target| ≤ tol; alternates secant steps with bisection so the
/// bracket always shrinks.
pub fn find_root_increasing(
    g: impl Fn(f64) -> f64,
    target: f64,
    bracket: (f64, f64),
    tol: f64,
) -> Result<f64> {
    let (mut a, mut b) = bracket;
    if !(a < b) {
        return Err(Error::domain(format!(
            "bracket must satisfy lo < hi, got ({a}, {b})"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be > 0, got {tol}")));
    }
    let ga = g(a);
    let gb = g(b);
    // Allow decreasing g by flipping the sign once.
    let sign = if ga <= gb { 1.0 } else { -1.0 };
    let mut fa = sign * (ga - target);
    let mut fb = sign * (gb - target);
    if fa.abs() <= tol {
        return Ok(a);
    }
    if fb.abs() <= tol {
        return Ok(b);
    }
    if fa > 0.0 || fb < 0.0 {
        return Err(Error::Bracket(format!(
            "target {target} not enclosed by g({a})={ga}, g({b})={gb}"
        )));
    }
    for iter in 0..MAX_ITER {
        // Secant proposal, clipped into the open bracket; bisection on
        // odd iterations guarantees geometric shrinkage.
        let mid = 0.5 * (a + b);
        let mut x = if iter % 2 == 0 && fb != fa {
            a - fa * (b - a) / (fb - fa)
        } else {
            mid
        };
        if !x.is_finite() || x <= a || x >= b {
            x = mid;
        }
        let fx = sign * (g(x) - target);
        if fx.abs() <= tol {
            return Ok(x);
        }
        if fx < 0.0 {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        if (b - a).abs() <= f64::EPSILON * (a.abs().max(b.abs()).max(1.0)) {
            // Interval collapsed to machine resolution; report the better end.
            let x = if fa.abs() < fb.abs() { a } else { b };
            let fx = fa.abs().min(fb.abs());
            if fx <= tol.max(1e-9) {
                return Ok(x);
            }
            return Err(Error::NonConvergence(format!(
                "bracket collapsed at x={x} with residual {fx:.3e} > tol {tol:.3e}"
            )));
        }
    }
    Err(Error::NonConvergence(format!(
        "root not located within {MAX_ITER} iterations; bracket ({a}, {b})"
    )))
}
