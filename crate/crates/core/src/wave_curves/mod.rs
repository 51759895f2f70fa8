//! Rarefaction, shock and composite Lax curves through a state.
//!
//! The strength `σ` of an `i`-wave is the jump of the Riemann coordinate `w_i`
//! when the model has a chart, and arclength along the unit eigenvector `r_i`
//! otherwise. `σ > 0` selects the rarefaction branch, `σ < 0` the shock branch.

mod deviation;
pub mod ode;

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux_models::{lambda, FluxModel, State};
use crate::linalg;

pub use deviation::shock_deviation_coefficient;
pub use ode::OdeOptions;

/// Elementary wave type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveKind {
    Shock,
    Rarefaction,
    Contact,
}

impl WaveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WaveKind::Shock => "shock",
            WaveKind::Rarefaction => "rarefaction",
            WaveKind::Contact => "contact",
        }
    }
}

/// A point `Ψ_i(σ)(u0)` together with its speed.
///
/// On the shock branch `speed` is the Rankine–Hugoniot speed; elsewhere it is
/// the characteristic speed `λ_i` at `state`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub state: State,
    pub speed: f64,
    pub sigma: f64,
    pub kind: WaveKind,
}

const SHOCK_TOL: f64 = 1e-12;
const SHOCK_ACCEPT: f64 = 1e-10;
const SHOCK_MAX_ITER: usize = 50;
const TINY_JUMP: f64 = 1e-5;

fn check_radius(model: &dyn FluxModel, sigma: f64) -> Result<()> {
    let radius = model.curve_radius();
    if sigma.abs() > radius {
        return Err(Error::RadiusExceeded {
            size: sigma.abs(),
            radius,
        });
    }
    Ok(())
}

fn check_family(model: &dyn FluxModel, i: usize) -> Result<()> {
    if i >= model.dim() {
        return Err(Error::Precondition(format!(
            "family index {} out of range for a {}-family system",
            i + 1,
            model.dim()
        )));
    }
    Ok(())
}

/// `R_i(σ)(u0)`, the integral curve of `r_i` through `u0`.
pub fn rarefaction_curve(model: &dyn FluxModel, u0: &State, i: usize, sigma: f64) -> Result<CurvePoint> {
    check_family(model, i)?;
    if !model.admits(u0) {
        return Err(Error::domain(u0));
    }
    check_radius(model, sigma)?;
    let kind = if model.linearly_degenerate(i) {
        WaveKind::Contact
    } else {
        WaveKind::Rarefaction
    };
    if sigma == 0.0 {
        return Ok(CurvePoint {
            speed: lambda(model, u0, i)?,
            state: u0.clone(),
            sigma,
            kind,
        });
    }
    let state = match model.chart() {
        Some(chart) => {
            let mut w = chart.to_w(u0)?;
            w[i] += sigma;
            chart
                .from_w(&w)
                .ok()
                .filter(|u| model.admits(u))
                .ok_or(Error::CurveExit { family: i + 1, sigma })?
        }
        None => integrate_rarefaction(model, u0, i, sigma, OdeOptions::default())?,
    };
    Ok(CurvePoint {
        speed: lambda(model, &state, i)?,
        state,
        sigma,
        kind,
    })
}

/// Integrates `du/ds = r̂_i(u)` (unit eigenvector) over `s ∈ [0, σ]`.
///
/// Used for models without a chart; chart models can call it to cross-check.
pub fn integrate_rarefaction(
    model: &dyn FluxModel,
    u0: &State,
    i: usize,
    sigma: f64,
    opts: OdeOptions,
) -> Result<State> {
    let r0 = model.eigen_structure(u0)?.r(i);
    let field = |y: &DVector<f64>| -> Result<DVector<f64>> {
        if !model.admits(y) {
            return Err(Error::CurveExit { family: i + 1, sigma });
        }
        let mut r = model.eigen_structure(y)?.r(i);
        r /= r.norm();
        if r.dot(&r0) < 0.0 {
            r = -r;
        }
        Ok(r)
    };
    let out = ode::integrate(field, u0, sigma, opts).map_err(|e| match e {
        ode::OdeError::Rhs(err) => err,
        ode::OdeError::StepBudget => Error::CurveExit { family: i + 1, sigma },
    })?;
    if !model.admits(&out) {
        return Err(Error::CurveExit { family: i + 1, sigma });
    }
    Ok(out)
}

/// Strength functional `g(u) − g(u0)` used to pin the shock curve, and its gradient.
type StrengthFn<'a> = Box<dyn Fn(&State) -> Result<(f64, State)> + 'a>;

fn strength<'a>(model: &'a dyn FluxModel, u0: &State, i: usize) -> Result<StrengthFn<'a>> {
    match model.chart() {
        Some(chart) => {
            let w0 = chart.to_w(u0)?[i];
            Ok(Box::new(move |u: &State| {
                let w = chart.to_w(u)?[i];
                let grad = model.eigen_structure(u)?.l(i);
                Ok((w - w0, grad))
            }))
        }
        None => {
            let mut r0 = model.eigen_structure(u0)?.r(i);
            r0 /= r0.norm();
            let base = u0.clone();
            Ok(Box::new(move |u: &State| Ok((r0.dot(&(u - &base)), r0.clone()))))
        }
    }
}

fn rh_vector(model: &dyn FluxModel, u0: &State, f0: &State, u: &State, s: f64) -> State {
    model.flux_unchecked(u) - f0 - (u - u0) * s
}

/// Rankine–Hugoniot residual `|f(ur) − f(ul) − s (ur − ul)|∞`.
pub fn rh_residual(model: &dyn FluxModel, ul: &State, ur: &State, speed: f64) -> Result<f64> {
    let fl = model.eval_flux(ul)?;
    let fr = model.eval_flux(ur)?;
    Ok(linalg::max_abs(&(fr - fl - (ur - ul) * speed)))
}

/// Point of the Hugoniot locus with strength `σ` (either sign) and its speed.
pub fn hugoniot_point(model: &dyn FluxModel, u0: &State, i: usize, sigma: f64) -> Result<(State, f64)> {
    check_family(model, i)?;
    check_radius(model, sigma)?;
    let f0 = model.eval_flux(u0)?;
    if sigma == 0.0 {
        return Ok((u0.clone(), lambda(model, u0, i)?));
    }
    let n = model.dim();
    let guess = rarefaction_curve(model, u0, i, sigma)?;
    let g = strength(model, u0, i)?;
    let mut u = guess.state;
    let mut s = 0.5 * (lambda(model, u0, i)? + guess.speed);
    let scale = 1.0 + linalg::max_abs(&f0);

    let residual = |u: &State, s: f64| -> Result<(DVector<f64>, f64)> {
        let mut r = DVector::zeros(n + 1);
        r.rows_mut(0, n).copy_from(&rh_vector(model, u0, &f0, u, s));
        r[n] = g(u)?.0 - sigma;
        let norm = linalg::max_abs(&r);
        Ok((r, norm))
    };

    let (mut res, mut norm) = residual(&u, s)?;
    let mut iterations = 0;
    while iterations < SHOCK_MAX_ITER && norm > 1e-16 * scale {
        iterations += 1;
        let df = model.jacobian(&u);
        let grad = g(&u)?.1;
        let mut jac = DMatrix::zeros(n + 1, n + 1);
        jac.view_mut((0, 0), (n, n)).copy_from(&(df - DMatrix::identity(n, n) * s));
        jac.view_mut((0, n), (n, 1)).copy_from(&(-(&u - u0)));
        jac.view_mut((n, 0), (1, n)).copy_from(&grad.transpose());
        let Some(step) = linalg::solve(jac, &(-&res)) else {
            break;
        };
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-4 {
            let cand_u = &u + step.rows(0, n) * t;
            let cand_s = s + step[n] * t;
            if model.admits(&cand_u) {
                if let Ok((r, nn)) = residual(&cand_u, cand_s) {
                    accepted = Some((cand_u, cand_s, r, nn));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((nu, ns, nr, nn)) = accepted else {
            break;
        };
        let stalled = nn >= 0.5 * norm && norm <= SHOCK_TOL * scale;
        let improved = nn < norm;
        if improved || !stalled {
            u = nu;
            s = ns;
            res = nr;
            norm = nn;
        }
        if stalled {
            break;
        }
    }
    if norm > SHOCK_ACCEPT * scale || !model.admits(&u) {
        return Err(Error::NewtonDiverged {
            what: "shock curve",
            residual: norm,
            iterations,
        });
    }
    // For tiny jumps the flux difference only fixes s to ~1e-16/|Δu|;
    // the midpoint speed is exact up to O(σ²).
    if linalg::max_abs(&(&u - u0)) < TINY_JUMP * (1.0 + linalg::max_abs(u0)) {
        s = 0.5 * (lambda(model, u0, i)? + lambda(model, &u, i)?);
    }
    Ok((u, s))
}

/// `S_i(σ)(u0)` with its Rankine–Hugoniot speed. Linearly degenerate
/// families return the contact discontinuity on the integral curve.
pub fn shock_curve(model: &dyn FluxModel, u0: &State, i: usize, sigma: f64) -> Result<CurvePoint> {
    check_family(model, i)?;
    if !model.admits(u0) {
        return Err(Error::domain(u0));
    }
    if model.linearly_degenerate(i) {
        return rarefaction_curve(model, u0, i, sigma);
    }
    let (state, speed) = hugoniot_point(model, u0, i, sigma)?;
    Ok(CurvePoint {
        state,
        speed,
        sigma,
        kind: WaveKind::Shock,
    })
}

/// `Ψ_i(σ)(u0)`: rarefaction branch for `σ ≥ 0`, shock branch for `σ < 0`.
pub fn lax_curve(model: &dyn FluxModel, u0: &State, i: usize, sigma: f64) -> Result<CurvePoint> {
    if sigma >= 0.0 {
        rarefaction_curve(model, u0, i, sigma)
    } else {
        shock_curve(model, u0, i, sigma)
    }
}

/// Samples `Ψ_i` at the given strengths.
pub fn sample_lax_curve(model: &dyn FluxModel, u0: &State, i: usize, sigmas: &[f64]) -> Result<Vec<CurvePoint>> {
    sigmas.iter().map(|&s| lax_curve(model, u0, i, s)).collect()
}

/// CSV with columns `sigma, u1..un, speed, kind`.
pub fn curve_csv(points: &[CurvePoint]) -> String {
    let n = points.first().map_or(0, |p| p.state.len());
    let mut out = String::from("sigma");
    for k in 1..=n {
        let _ = write!(out, ",u{k}");
    }
    out.push_str(",speed,kind\n");
    for p in points {
        let _ = write!(out, "{:.16e}", p.sigma);
        for x in p.state.iter() {
            let _ = write!(out, ",{x:.16e}");
        }
        let _ = writeln!(out, ",{:.16e},{}", p.speed, p.kind.as_str());
    }
    out
}

#[cfg(test)]
mod tests;
