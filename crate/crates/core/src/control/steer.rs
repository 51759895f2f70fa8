use std::sync::Arc;

use serde::Serialize;

use super::{advance_with_exits, constant_chain, ControlAction, ControlPlan};
use crate::error::{Error, Result};
use crate::flux_models::{FluxModel, State};
use crate::fronttrack::{Side, Simulation, TrackingOptions};
use crate::profile::PiecewiseProfile;
use crate::riemann::split_boundary_pair;

#[derive(Debug, Clone)]
pub struct SteerOptions {
    /// Crossing time of the interval.
    pub tau: f64,
    /// Largest hop between consecutive constants, in Riemann coordinates.
    pub delta_chain: f64,
    pub tracking: TrackingOptions,
}

#[derive(Debug, Clone, Serialize)]
pub struct SteeringOutcome {
    pub plan: ControlPlan,
    pub hops: usize,
    pub horizon: f64,
    pub final_sup_distance: f64,
    pub final_front_count: usize,
    #[serde(skip)]
    pub simulation: Simulation,
}

fn check_flat(sim: &Simulation, when: &str) -> Result<()> {
    let worst = sim.fronts().iter().map(|f| f.sigma.abs()).fold(0.0, f64::max);
    if worst > 1e-10 {
        return Err(Error::Invariant(format!(
            "{} fronts remain {when} (strongest |σ| = {worst:e}) at t = {}",
            sim.front_count(),
            sim.time()
        )));
    }
    Ok(())
}

/// Drives the constant state `from` to the constant state `to` on `[a, b]`.
///
/// Each hop `ω_{k−1} → ω_k` takes `2τ`: the splitting state `v″` is imposed
/// at `b`, its fan leaves through `a` within `τ`, then `ω_k` is imposed at `a`.
pub fn steer_constant_states(
    model: Arc<dyn FluxModel>,
    a: f64,
    b: f64,
    from: &State,
    to: &State,
    opts: &SteerOptions,
) -> Result<SteeringOutcome> {
    if !(opts.tau > 0.0) {
        return Err(Error::Precondition(format!("crossing time must be positive, got {}", opts.tau)));
    }
    let chain = constant_chain(model.as_ref(), from, to, opts.delta_chain)?;
    let data = PiecewiseProfile::constant(a, b, from)?;
    let mut sim = Simulation::new(model.clone(), &data, opts.tracking)?;
    let tau = opts.tau;
    let slack = 1e-9 * tau;
    let mut plan = ControlPlan {
        tau,
        chain: chain.iter().map(|u| u.iter().copied().collect()).collect(),
        ..Default::default()
    };
    for (k, pair) in chain.windows(2).enumerate() {
        let t0 = 2.0 * k as f64 * tau;
        advance_with_exits(&mut sim, t0, slack)?;
        let split = split_boundary_pair(model.as_ref(), &pair[0], &pair[1], &opts.tracking.riemann)?;
        let v2 = split.state();
        sim.inject_boundary_riemann(Side::B, &v2)?;
        plan.actions.push(ControlAction {
            time: t0,
            side: Side::B,
            outer: split.state.clone(),
            split_residual: split.residual,
        });
        advance_with_exits(&mut sim, t0 + tau, slack)?;
        check_flat(&sim, "after the b-side injection")?;
        sim.inject_boundary_riemann(Side::A, &pair[1])?;
        plan.actions.push(ControlAction {
            time: t0 + tau,
            side: Side::A,
            outer: pair[1].iter().copied().collect(),
            split_residual: 0.0,
        });
    }
    let hops = chain.len() - 1;
    let horizon = 2.0 * hops as f64 * tau;
    advance_with_exits(&mut sim, horizon, slack)?;
    check_flat(&sim, "at the end of the last hop")?;
    plan.horizon = horizon;
    let snap = sim.snapshot();
    Ok(SteeringOutcome {
        plan,
        hops,
        horizon,
        final_sup_distance: snap.sup_distance(to),
        final_front_count: sim.front_count(),
        simulation: sim,
    })
}
