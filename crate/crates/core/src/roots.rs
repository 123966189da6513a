//! Safeguarded Newton iteration for strictly increasing scalar functions.

use crate::error::{domain, Result};

/// Outcome of [`increasing_root`].
#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    /// `g(x)` at the returned point.
    pub residual: f64,
    pub iterations: usize,
}

/// Finds the zero of a strictly increasing `g` on `[lo, hi]` with
/// `g(lo) <= 0 <= g(hi)`. `g` returns `(value, derivative)`.
///
/// Newton steps are taken when they stay strictly inside the current
/// bracket; otherwise the bracket is bisected. Stops when `|g| <= f_tol`
/// or the bracket collapses to adjacent floats.
pub fn increasing_root<G>(g: G, mut lo: f64, mut hi: f64, f_tol: f64) -> Result<Root>
where
    G: Fn(f64) -> Result<(f64, f64)>,
{
    if !(lo < hi) {
        return Err(domain(format!("empty bracket [{lo}, {hi}]")));
    }
    let (g_lo, _) = g(lo)?;
    let (g_hi, _) = g(hi)?;
    if g_lo > 0.0 || g_hi < 0.0 {
        return Err(domain(format!(
            "bracket does not straddle the root: g({lo})={g_lo}, g({hi})={g_hi}"
        )));
    }
    if g_lo == 0.0 {
        return Ok(Root { x: lo, residual: 0.0, iterations: 0 });
    }
    if g_hi == 0.0 {
        return Ok(Root { x: hi, residual: 0.0, iterations: 0 });
    }

    let mut x = 0.5 * (lo + hi);
    let mut best = Root { x, residual: f64::INFINITY, iterations: 0 };
    for it in 1..=500 {
        let (val, der) = g(x)?;
        if val.abs() < best.residual.abs() {
            best = Root { x, residual: val, iterations: it };
        }
        if val.abs() <= f_tol {
            return Ok(Root { x, residual: val, iterations: it });
        }
        if val < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - val / der;
        let next = if der > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next <= lo || next >= hi {
            break;
        }
        x = next;
    }
    best.iterations = best.iterations.max(1);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_root_of_two() {
        let r = increasing_root(|x| Ok((x * x * x - 2.0, 3.0 * x * x)), 0.0, 2.0, 1e-15).unwrap();
        assert!((r.x - 2f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_bracket() {
        assert!(increasing_root(|x| Ok((x - 5.0, 1.0)), 0.0, 1.0, 1e-12).is_err());
        assert!(increasing_root(|x| Ok((x, 1.0)), 1.0, 0.0, 1e-12).is_err());
    }

    #[test]
    fn bad_derivative_falls_back_to_bisection() {
        // Derivative deliberately wrong sign; bisection must still converge.
        let r = increasing_root(|x| Ok((x - 0.3, -1.0)), 0.0, 1.0, 1e-14).unwrap();
        assert!((r.x - 0.3).abs() < 1e-13);
    }
}
