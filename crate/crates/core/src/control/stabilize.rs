use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use super::{advance_with_exits, constant_chain, ControlAction, ControlPlan};
use crate::error::{Error, Result};
use crate::flux_models::{FluxModel, State};
use crate::fronttrack::{Origin, Side, Simulation, TrackingOptions};
use crate::profile::PiecewiseProfile;
use crate::riemann::{split_boundary_pair, split_boundary_pair_reverse};

#[derive(Debug, Clone)]
pub struct StabilizeOptions {
    pub tau: f64,
    /// Largest admissible `max(sup|u − u*|, TV)` at the start of a step.
    pub delta0: f64,
    /// Number of three-phase steps after the pre-phase.
    pub iterations: usize,
    /// Front accuracy of the first step; step `k` uses `ε_0 · decay^k`.
    pub eps0: f64,
    pub eps_decay: f64,
    /// Stop once `δ_k` drops below this.
    pub floor: f64,
    /// Chain step of the pre-phase.
    pub delta_chain: f64,
    pub tracking: TrackingOptions,
}

impl StabilizeOptions {
    pub fn new(tau: f64, eps0: f64) -> Self {
        Self {
            tau,
            delta0: 0.2,
            iterations: 4,
            eps0,
            eps_decay: 0.25,
            floor: 1e-9,
            delta_chain: 0.05,
            tracking: TrackingOptions::new(eps0),
        }
    }
}

/// Diagnostics of one three-phase step on `[t, t + 3τ]`.
#[derive(Debug, Clone, Serialize)]
pub struct StepMetrics {
    pub t_start: f64,
    pub t_end: f64,
    pub epsilon: f64,
    pub delta_in: f64,
    pub sup_distance: f64,
    pub total_variation: f64,
    pub delta_out: f64,
    /// Fronts still inside after the free phase.
    pub phase1_survivors: usize,
    pub phase1_total_variation: f64,
    /// Injected fronts still inside one crossing time after their injection.
    pub fan_b_survivors: usize,
    pub fan_a_survivors: usize,
    pub actions: Vec<ControlAction>,
}

fn delta(sim: &Simulation, target: &State) -> (f64, f64) {
    let snap = sim.snapshot();
    // `+ 0.0` turns an empty sum's -0.0 into 0.0 for the reports
    (snap.sup_distance(target) + 0.0, snap.total_variation() + 0.0)
}

fn injected_survivors(sim: &Simulation, side: Side, t_inject: f64) -> usize {
    sim.fronts()
        .iter()
        .filter(|f| f.origin == Origin::Boundary(side) && f.t0 == t_inject)
        .count()
}

fn step_towards(
    sim: &mut Simulation,
    target: &State,
    tau: f64,
    precondition: Option<f64>,
) -> Result<StepMetrics> {
    let model = sim.model().clone();
    let ropts = sim.options().riemann;
    let slack = 1e-9 * tau;
    let t0 = sim.time();
    let (sup0, tv0) = delta(sim, target);
    let delta_in = sup0.max(tv0);
    if let Some(bound) = precondition {
        if delta_in > bound {
            return Err(Error::Precondition(format!(
                "max(sup|u − u*|, TV) = {delta_in:e} exceeds the stabilization radius {bound:e}"
            )));
        }
    }
    let mut actions = Vec::new();

    advance_with_exits(sim, t0 + tau, slack)?;
    let phase1_survivors = sim.front_count();
    let phase1_total_variation = sim.snapshot().total_variation();

    let t1 = sim.time();
    let v = sim.trace(Side::B).clone();
    let split = split_boundary_pair(model.as_ref(), &v, target, &ropts)?;
    sim.inject_boundary_riemann(Side::B, &split.state())?;
    actions.push(ControlAction {
        time: t1,
        side: Side::B,
        outer: split.state.clone(),
        split_residual: split.residual,
    });

    advance_with_exits(sim, t0 + 2.0 * tau, slack)?;
    let fan_b_survivors = injected_survivors(sim, Side::B, t1);
    let t2 = sim.time();
    let w = sim.trace(Side::A).clone();
    let rsplit = split_boundary_pair_reverse(model.as_ref(), &w, target, &ropts)?;
    sim.inject_boundary_riemann(Side::A, &rsplit.state())?;
    actions.push(ControlAction {
        time: t2,
        side: Side::A,
        outer: rsplit.state.clone(),
        split_residual: rsplit.residual,
    });

    advance_with_exits(sim, t0 + 3.0 * tau, slack)?;
    let fan_a_survivors = injected_survivors(sim, Side::A, t2);
    let (sup, tv) = delta(sim, target);
    Ok(StepMetrics {
        t_start: t0,
        t_end: sim.time(),
        epsilon: sim.options().epsilon,
        delta_in,
        sup_distance: sup,
        total_variation: tv,
        delta_out: sup.max(tv),
        phase1_survivors,
        phase1_total_variation,
        fan_b_survivors,
        fan_a_survivors,
        actions,
    })
}

/// One step on `[t, t + 3τ]`: free evolution for `τ`, then the forward
/// splitting state at `b`, then after another `τ` the reverse splitting state
/// at `a`. Requires `max(sup|u − u*|, TV) ≤ delta0` at the start.
pub fn stabilization_step(sim: &mut Simulation, u_star: &State, tau: f64, delta0: f64) -> Result<StepMetrics> {
    step_towards(sim, u_star, tau, Some(delta0))
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionRow {
    pub k: usize,
    pub t: f64,
    pub epsilon: f64,
    pub sup_distance: f64,
    pub total_variation: f64,
    pub delta: f64,
    /// `δ_k / δ_{k−1}²`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionRecord {
    pub tau: f64,
    pub pre_phase_hops: usize,
    pub pre_phase_horizon: f64,
    pub rows: Vec<ContractionRow>,
    pub steps: Vec<StepMetrics>,
    pub halted_at_floor: bool,
    /// Set when `δ_{k+1} ≥ δ_k` above the floor.
    pub failure: Option<String>,
    pub plan: ControlPlan,
}

impl ContractionRecord {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,t,sup_dist,tv,ratio\n");
        for r in &self.rows {
            let ratio = r.ratio.map(|x| format!("{x:.16e}")).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{:.16e},{:.16e},{:.16e},{}",
                r.k, r.t, r.sup_distance, r.total_variation, ratio
            );
        }
        s
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.delta).collect()
    }
}

/// Runs the stabilization loop from `φ` towards `u*`.
///
/// When `φ` starts farther than `delta0` from `u*`, a pre-phase walks a
/// chain of constants from the mean of `φ` to `u*`, one three-phase step per
/// hop. Returns the record together with the final simulation.
pub fn stabilize(
    model: Arc<dyn FluxModel>,
    phi: &PiecewiseProfile,
    u_star: &State,
    opts: &StabilizeOptions,
) -> Result<(ContractionRecord, Simulation)> {
    if !model.admits(u_star) {
        return Err(Error::domain(u_star));
    }
    let mut tracking = opts.tracking;
    tracking.epsilon = opts.eps0;
    let mut sim = Simulation::new(model.clone(), phi, tracking)?;
    let mut record = ContractionRecord {
        tau: opts.tau,
        pre_phase_hops: 0,
        pre_phase_horizon: 0.0,
        rows: Vec::new(),
        steps: Vec::new(),
        halted_at_floor: false,
        failure: None,
        plan: ControlPlan {
            tau: opts.tau,
            ..Default::default()
        },
    };

    let (sup, _) = delta(&sim, u_star);
    if sup > opts.delta0 {
        let chain = constant_chain(model.as_ref(), &phi.mean(), u_star, opts.delta_chain)?;
        record.plan.chain = chain.iter().map(|u| u.iter().copied().collect()).collect();
        for target in chain.iter().skip(1) {
            let m = step_towards(&mut sim, target, opts.tau, None)?;
            record.plan.actions.extend(m.actions.iter().cloned());
            record.pre_phase_hops += 1;
        }
        record.pre_phase_horizon = sim.time();
    }

    let push_row = |record: &mut ContractionRecord, sim: &Simulation, k: usize| {
        let (sup, tv) = delta(sim, u_star);
        let d = sup.max(tv);
        let ratio = record.rows.last().map(|prev: &ContractionRow| d / (prev.delta * prev.delta));
        record.rows.push(ContractionRow {
            k,
            t: sim.time(),
            epsilon: sim.options().epsilon,
            sup_distance: sup,
            total_variation: tv,
            delta: d,
            ratio,
        });
        d
    };
    let mut current = push_row(&mut record, &sim, 0);
    for k in 0..opts.iterations {
        if current < opts.floor {
            record.halted_at_floor = true;
            break;
        }
        sim.set_epsilon(opts.eps0 * opts.eps_decay.powi(k as i32));
        let m = stabilization_step(&mut sim, u_star, opts.tau, opts.delta0)?;
        record.plan.actions.extend(m.actions.iter().cloned());
        record.steps.push(m);
        let next = push_row(&mut record, &sim, k + 1);
        if next >= current && next >= opts.floor {
            record.failure = Some(format!(
                "no contraction at step {}: δ went from {current:e} to {next:e}",
                k + 1
            ));
            break;
        }
        current = next;
    }
    if current < opts.floor {
        record.halted_at_floor = true;
    }
    record.plan.horizon = sim.time();
    Ok((record, sim))
}
