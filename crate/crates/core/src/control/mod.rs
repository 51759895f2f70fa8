//! Boundary control: exact control of linear systems, steering between
//! constant states, and the three-phase stabilization loop.

mod linear;
mod stabilize;
mod steer;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux_models::{DomainBox, FluxModel, State};
use crate::fronttrack::{Side, Simulation};

pub use linear::{linear_exact_control, LinearControl, ScalarProfile};
pub use stabilize::{stabilization_step, stabilize, ContractionRecord, ContractionRow, StabilizeOptions, StepMetrics};
pub use steer::{steer_constant_states, SteerOptions, SteeringOutcome};

/// `τ = max_i sup_u (b − a)/|λ_i(u)|` over a uniform grid of `bounds`.
///
/// Fails when a sampled speed has the wrong sign for its family or falls
/// below `speed_floor`.
pub fn crossing_time(
    model: &dyn FluxModel,
    a: f64,
    b: f64,
    bounds: &DomainBox,
    per_axis: usize,
    speed_floor: f64,
) -> Result<f64> {
    if !(b > a) {
        return Err(Error::Precondition(format!("empty interval [{a}, {b}]")));
    }
    let p = model.negative_families();
    let mut min_speed = f64::INFINITY;
    for u in bounds.grid(per_axis) {
        let es = model.eigen_structure(&u)?;
        for i in 0..model.dim() {
            let l = es.lambda(i);
            let signed = if i < p { -l } else { l };
            if signed <= speed_floor.max(0.0) {
                return Err(Error::Precondition(format!(
                    "characteristic speed λ_{} = {l} at {:?} violates the speed floor {speed_floor}",
                    i + 1,
                    u.as_slice()
                )));
            }
            min_speed = min_speed.min(l.abs());
        }
    }
    Ok((b - a) / min_speed)
}

/// One boundary action of a control plan.
#[derive(Debug, Clone, Serialize)]
pub struct ControlAction {
    pub time: f64,
    pub side: Side,
    pub outer: Vec<f64>,
    /// Residual of the splitting problem that produced `outer`.
    pub split_residual: f64,
}

/// Ordered boundary actions with the expected chain of constants.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ControlPlan {
    pub actions: Vec<ControlAction>,
    pub horizon: f64,
    pub tau: f64,
    pub chain: Vec<Vec<f64>>,
}

impl ControlPlan {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }
}

/// Advances to `t`, then also resolves exits that are late only by roundoff.
pub(crate) fn advance_with_exits(sim: &mut Simulation, t: f64, slack: f64) -> Result<()> {
    sim.advance_to(t)?;
    while let Some(ev) = sim.next_event() {
        match ev {
            crate::fronttrack::Event::Exit { time, .. } if time <= t + slack => sim.resolve(ev)?,
            _ => break,
        }
    }
    Ok(())
}

/// Straight chain `ω_0 = from, …, ω_N = to` in Riemann coordinates (or in
/// state space for chartless models) with `N = ceil(|Δw| / step)`.
pub fn constant_chain(model: &dyn FluxModel, from: &State, to: &State, step: f64) -> Result<Vec<State>> {
    if !(step > 0.0) {
        return Err(Error::Precondition(format!("chain step must be positive, got {step}")));
    }
    let (wa, wb) = match model.chart() {
        Some(c) => (c.to_w(from)?, c.to_w(to)?),
        None => (from.clone(), to.clone()),
    };
    let dist = (&wb - &wa).norm();
    let n = (dist / step).ceil() as usize;
    let mut out = vec![from.clone()];
    for k in 1..=n {
        let w = &wa + (&wb - &wa) * (k as f64 / n as f64);
        let u = match model.chart() {
            Some(c) => c.from_w(&w)?,
            None => w,
        };
        if !model.admits(&u) {
            return Err(Error::domain(&u));
        }
        out.push(u);
    }
    if n > 0 {
        *out.last_mut().unwrap() = to.clone();
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
