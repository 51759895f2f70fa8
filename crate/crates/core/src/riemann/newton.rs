//! Damped Newton iteration with a finite-difference Jacobian.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, Copy)]
pub(crate) struct NewtonSettings {
    pub fd_step: f64,
    pub tol: f64,
    pub accept: f64,
    pub step_tol: f64,
    pub max_iter: usize,
}

/// Drives `F(x) → 0`. Iterates past `tol` until the residual stops shrinking,
/// so that tiny components of `x` are resolved to roundoff.
pub(crate) fn solve<F>(what: &'static str, f: F, x0: DVector<f64>, s: NewtonSettings) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let diverged = |residual: f64, iterations: usize| Error::NewtonDiverged {
        what,
        residual,
        iterations,
    };
    let mut x = x0;
    let mut r = f(&x).map_err(|_| diverged(f64::INFINITY, 0))?;
    let mut norm = linalg::max_abs(&r);
    let mut it = 0;
    while it < s.max_iter && norm > 1e-16 {
        it += 1;
        let jac = linalg::fd_jacobian(&f, &x, s.fd_step).map_err(|_| diverged(norm, it))?;
        let Some(dx) = linalg::solve(jac, &(-&r)) else {
            break;
        };
        let mut t = 1.0;
        let mut accepted = None;
        while t >= 1.0 / 1024.0 {
            let cand = &x + &dx * t;
            if let Ok(rc) = f(&cand) {
                let nc = linalg::max_abs(&rc);
                if nc < norm * (1.0 - 1e-4 * t) || (norm <= s.tol && nc <= norm) {
                    accepted = Some((cand, rc, nc));
                    break;
                }
            }
            if norm <= s.tol {
                break;
            }
            t *= 0.5;
        }
        let Some((xn, rn, nn)) = accepted else {
            break;
        };
        let step = linalg::max_abs(&(&xn - &x));
        let small_gain = nn > 0.25 * norm;
        x = xn;
        r = rn;
        norm = nn;
        if norm <= s.tol && (small_gain || step < s.step_tol) {
            break;
        }
    }
    if norm > s.accept {
        return Err(diverged(norm, it));
    }
    Ok(x)
}
