//! Riemann problems and the boundary splitting problems.
//!
//! Everything is solved by Newton iteration on compositions of Lax curves
//! `Ψ_n(σ_n)∘…∘Ψ_1(σ_1)`. Jumps are limited to a solvable radius measured in
//! Riemann-coordinate units (or in state units for chartless models).

mod newton;

use std::fmt::Write as _;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux_models::{FluxModel, State};
use crate::linalg;
use crate::wave_curves::{lax_curve, WaveKind};

use newton::NewtonSettings;

/// Strengths below this are null waves and are dropped.
pub const NULL_WAVE: f64 = 1e-12;

/// Tuning of the Newton-based solvers.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RiemannOptions {
    /// Solvable radius `delta_riemann`.
    pub delta: f64,
    pub fd_step: f64,
    pub tol: f64,
    pub step_tol: f64,
    pub max_iter: usize,
}

impl Default for RiemannOptions {
    fn default() -> Self {
        Self {
            delta: 0.3,
            fd_step: 1e-7,
            tol: 1e-12,
            step_tol: 1e-14,
            max_iter: 60,
        }
    }
}

impl RiemannOptions {
    pub fn with_delta(delta: f64) -> Self {
        Self {
            delta,
            ..Self::default()
        }
    }

    fn newton(&self) -> NewtonSettings {
        NewtonSettings {
            fd_step: self.fd_step,
            tol: self.tol,
            accept: 1e-10,
            step_tol: self.step_tol,
            max_iter: self.max_iter,
        }
    }
}

/// One elementary wave of a Riemann fan.
#[derive(Debug, Clone, Serialize)]
pub struct WaveInfo {
    /// Zero-based family index.
    pub family: usize,
    pub sigma: f64,
    /// `None` for a null wave.
    pub kind: Option<WaveKind>,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    /// Leftmost and rightmost speed of the wave; equal for discontinuities.
    pub speed_left: f64,
    pub speed_right: f64,
}

impl WaveInfo {
    pub fn is_null(&self) -> bool {
        self.kind.is_none()
    }
}

/// Solution of a Riemann problem `(u_l, u_r)`.
#[derive(Debug, Clone, Serialize)]
pub struct RiemannSolution {
    pub sigma: Vec<f64>,
    /// `u_0 = u_l, u_1, …, u_n = u_r`.
    pub states: Vec<Vec<f64>>,
    pub waves: Vec<WaveInfo>,
    /// `|Ψ(σ)(u_l) − u_r|∞`.
    pub residual: f64,
}

impl RiemannSolution {
    pub fn state(&self, k: usize) -> State {
        DVector::from_column_slice(&self.states[k])
    }

    /// Non-null waves in family order.
    pub fn active_waves(&self) -> impl Iterator<Item = &WaveInfo> {
        self.waves.iter().filter(|w| !w.is_null())
    }

    /// Aligned text table: family, sigma, kind, speeds, states.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>6} {:>24} {:>12} {:>24} {:>24}  left -> right",
            "family", "sigma", "kind", "speed_left", "speed_right"
        );
        for w in &self.waves {
            let kind = w.kind.map_or("null", WaveKind::as_str);
            let _ = writeln!(
                out,
                "{:>6} {:>24.16e} {:>12} {:>24.16e} {:>24.16e}  {:?} -> {:?}",
                w.family + 1,
                w.sigma,
                kind,
                w.speed_left,
                w.speed_right,
                w.left,
                w.right
            );
        }
        out
    }
}

/// Applies `Ψ_{f_k}(σ_k)` in order starting from `u0`; returns all visited states.
pub fn compose(model: &dyn FluxModel, u0: &State, families: &[usize], sigma: &[f64]) -> Result<Vec<State>> {
    let mut states = Vec::with_capacity(families.len() + 1);
    states.push(u0.clone());
    for (&i, &s) in families.iter().zip(sigma) {
        let next = lax_curve(model, states.last().unwrap(), i, s)?.state;
        states.push(next);
    }
    Ok(states)
}

/// Approximate strengths of `u → v` from the linearization at `u`
/// (exact Riemann-coordinate jumps when a chart exists).
fn linear_strengths(model: &dyn FluxModel, u: &State, v: &State) -> Result<DVector<f64>> {
    if let Some(chart) = model.chart() {
        return Ok(chart.to_w(v)? - chart.to_w(u)?);
    }
    let es = model.eigen_structure(u)?;
    let d = v - u;
    Ok(DVector::from_fn(model.dim(), |i, _| es.l(i).dot(&d) * es.r(i).norm()))
}

fn check_radius(model: &dyn FluxModel, u: &State, v: &State, delta: f64) -> Result<()> {
    if !model.curve_radius().is_finite() {
        return Ok(());
    }
    let size = linalg::max_abs(&linear_strengths(model, u, v)?);
    if size > delta {
        return Err(Error::RadiusExceeded { size, radius: delta });
    }
    Ok(())
}

fn admitted(model: &dyn FluxModel, u: &State) -> Result<()> {
    if model.admits(u) {
        Ok(())
    } else {
        Err(Error::domain(u))
    }
}

fn build_waves(model: &dyn FluxModel, states: &[State], families: &[usize], sigma: &[f64]) -> Result<Vec<WaveInfo>> {
    let mut waves = Vec::with_capacity(families.len());
    for (k, (&i, &s)) in families.iter().zip(sigma).enumerate() {
        let (l, r) = (&states[k], &states[k + 1]);
        let (kind, speed_left, speed_right) = if s.abs() < NULL_WAVE {
            let lam = crate::flux_models::lambda(model, l, i)?;
            (None, lam, lam)
        } else {
            let p = lax_curve(model, l, i, s)?;
            match p.kind {
                WaveKind::Shock | WaveKind::Contact => (Some(p.kind), p.speed, p.speed),
                WaveKind::Rarefaction => (Some(p.kind), crate::flux_models::lambda(model, l, i)?, p.speed),
            }
        };
        waves.push(WaveInfo {
            family: i,
            sigma: s,
            kind,
            left: l.iter().copied().collect(),
            right: r.iter().copied().collect(),
            speed_left,
            speed_right,
        });
    }
    Ok(waves)
}

fn to_vecs(states: &[State]) -> Vec<Vec<f64>> {
    states.iter().map(|s| s.iter().copied().collect()).collect()
}

/// Solves the Riemann problem with default options.
pub fn solve_riemann(model: &dyn FluxModel, ul: &State, ur: &State) -> Result<RiemannSolution> {
    solve_riemann_with(model, ul, ur, &RiemannOptions::default())
}

/// Finds `σ` with `Ψ_n(σ_n)∘…∘Ψ_1(σ_1)(u_l) = u_r`.
pub fn solve_riemann_with(
    model: &dyn FluxModel,
    ul: &State,
    ur: &State,
    opts: &RiemannOptions,
) -> Result<RiemannSolution> {
    admitted(model, ul)?;
    admitted(model, ur)?;
    check_radius(model, ul, ur, opts.delta)?;
    let n = model.dim();
    let families: Vec<usize> = (0..n).collect();
    let guess = linear_strengths(model, ul, ur)?;
    let all_degenerate = (0..n).all(|i| model.linearly_degenerate(i));
    let sigma = if all_degenerate && model.chart().is_some() {
        guess
    } else {
        let f = |s: &DVector<f64>| -> Result<DVector<f64>> {
            let st = compose(model, ul, &families, s.as_slice())?;
            Ok(st.last().unwrap() - ur)
        };
        newton::solve("riemann problem", f, guess, opts.newton())?
    };
    let mut sigma: Vec<f64> = sigma.iter().copied().collect();
    for s in &mut sigma {
        if s.abs() < NULL_WAVE {
            *s = 0.0;
        }
    }
    let states = compose(model, ul, &families, &sigma)?;
    let residual = linalg::max_abs(&(states.last().unwrap() - ur));
    let waves = build_waves(model, &states, &families, &sigma)?;
    Ok(RiemannSolution {
        sigma,
        states: to_vecs(&states),
        waves,
        residual,
    })
}

/// Result of a boundary splitting problem.
#[derive(Debug, Clone, Serialize)]
pub struct BoundarySplit {
    /// `v″` for the forward split, `v‴` for the reverse one.
    pub state: Vec<f64>,
    /// `σ_1..σ_n`; families `≤ p` on one side, `> p` on the other.
    pub sigma: Vec<f64>,
    pub residual: f64,
}

impl BoundarySplit {
    pub fn state(&self) -> State {
        DVector::from_column_slice(&self.state)
    }
}

fn split_families(model: &dyn FluxModel) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = model.dim();
    let p = model.negative_families();
    if p == 0 || p >= n {
        return Err(Error::Precondition(format!(
            "boundary splitting needs 1 <= p <= n-1, got p = {p}, n = {n}"
        )));
    }
    Ok(((0..p).collect(), (p..n).collect()))
}

/// Finds `v″` with `Ψ_p(σ_p)∘…∘Ψ_1(σ_1)(v) = v″ = Ψ_n(σ_n)∘…∘Ψ_{p+1}(σ_{p+1})(v′)`.
pub fn split_boundary_pair(
    model: &dyn FluxModel,
    v: &State,
    v_prime: &State,
    opts: &RiemannOptions,
) -> Result<BoundarySplit> {
    admitted(model, v)?;
    admitted(model, v_prime)?;
    check_radius(model, v, v_prime, opts.delta)?;
    let (lo, hi) = split_families(model)?;
    let p = lo.len();
    let d = linear_strengths(model, v, v_prime)?;
    let guess = DVector::from_fn(model.dim(), |i, _| if i < p { d[i] } else { -d[i] });
    let phi = |s: &DVector<f64>| -> Result<DVector<f64>> {
        let a = compose(model, v_prime, &hi, &s.as_slice()[p..])?;
        let b = compose(model, v, &lo, &s.as_slice()[..p])?;
        Ok(a.last().unwrap() - b.last().unwrap())
    };
    let sigma = newton::solve("boundary split", phi, guess, opts.newton())?;
    let lo_chain = compose(model, v, &lo, &sigma.as_slice()[..p])?;
    let hi_chain = compose(model, v_prime, &hi, &sigma.as_slice()[p..])?;
    let out = lo_chain.last().unwrap();
    Ok(BoundarySplit {
        state: out.iter().copied().collect(),
        sigma: sigma.iter().copied().collect(),
        residual: linalg::max_abs(&(hi_chain.last().unwrap() - out)),
    })
}

/// Finds `v‴` with `w = Ψ_n(σ_n)∘…∘Ψ_{p+1}(σ_{p+1})(v‴)` and
/// `u* = Ψ_p(σ_p)∘…∘Ψ_1(σ_1)(v‴)`.
pub fn split_boundary_pair_reverse(
    model: &dyn FluxModel,
    w: &State,
    u_star: &State,
    opts: &RiemannOptions,
) -> Result<BoundarySplit> {
    admitted(model, w)?;
    admitted(model, u_star)?;
    check_radius(model, u_star, w, opts.delta)?;
    let (lo, hi) = split_families(model)?;
    let n = model.dim();
    let p = lo.len();
    let d = linear_strengths(model, u_star, w)?;
    let sig0 = DVector::from_fn(n, |i, _| if i < p { -d[i] } else { d[i] });
    let back = compose(
        model,
        u_star,
        &lo.iter().rev().copied().collect::<Vec<_>>(),
        &sig0.as_slice()[..p].iter().rev().map(|s| -s).collect::<Vec<_>>(),
    )
    .map(|c| c.last().unwrap().clone())
    .unwrap_or_else(|_| u_star.clone());
    let mut guess = DVector::zeros(2 * n);
    guess.rows_mut(0, n).copy_from(&back);
    guess.rows_mut(n, n).copy_from(&sig0);
    let resid = |x: &DVector<f64>| -> Result<DVector<f64>> {
        let base: State = x.rows(0, n).into_owned();
        let s = x.rows(n, n);
        let hi_end = compose(model, &base, &hi, &s.as_slice()[p..])?;
        let lo_end = compose(model, &base, &lo, &s.as_slice()[..p])?;
        let mut r = DVector::zeros(2 * n);
        r.rows_mut(0, n).copy_from(&(hi_end.last().unwrap() - w));
        r.rows_mut(n, n).copy_from(&(lo_end.last().unwrap() - u_star));
        Ok(r)
    };
    let x = newton::solve("reverse boundary split", resid, guess, opts.newton())?;
    let residual = linalg::max_abs(&resid(&x)?);
    Ok(BoundarySplit {
        state: x.rows(0, n).iter().copied().collect(),
        sigma: x.rows(n, n).iter().copied().collect(),
        residual,
    })
}
