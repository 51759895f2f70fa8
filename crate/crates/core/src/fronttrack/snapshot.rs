use std::fmt::Write as _;

use nalgebra::DVector;
use serde::Serialize;

use super::functionals::glimm_functionals;
use super::types::{Front, FrontKind, Functionals};
use crate::error::Result;
use crate::flux_models::State;
use crate::profile::PiecewiseProfile;

/// Immutable picture of a simulation at one time.
#[derive(Debug, Clone, Serialize)]
pub struct Snapshot {
    pub time: f64,
    pub a: f64,
    pub b: f64,
    pub fronts: Vec<Front>,
    #[serde(serialize_with = "ser_states")]
    pub states: Vec<State>,
}

fn ser_states<S: serde::Serializer>(states: &[State], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = states.iter().map(|u| u.iter().copied().collect()).collect();
    rows.serialize(s)
}

impl Snapshot {
    pub fn new(time: f64, a: f64, b: f64, fronts: Vec<Front>, states: Vec<State>) -> Self {
        Self {
            time,
            a,
            b,
            fronts,
            states,
        }
    }

    /// Front positions, clamped to `[a, b]`.
    pub fn positions(&self) -> Vec<f64> {
        self.fronts
            .iter()
            .map(|f| f.position(self.time).clamp(self.a, self.b))
            .collect()
    }

    pub fn left_state(&self) -> &State {
        &self.states[0]
    }

    pub fn right_state(&self) -> &State {
        self.states.last().unwrap()
    }

    /// Right-continuous value at `x`.
    pub fn value_at(&self, x: f64) -> &State {
        let k = self.positions().partition_point(|&p| p <= x);
        &self.states[k]
    }

    pub fn functionals(&self) -> Functionals {
        glimm_functionals(&self.fronts, &self.states)
    }

    pub fn total_variation(&self) -> f64 {
        self.states.windows(2).map(|w| (&w[1] - &w[0]).norm()).sum::<f64>() + 0.0
    }

    /// `sup_x |u(x) − u*|`.
    pub fn sup_distance(&self, u_star: &State) -> f64 {
        self.states.iter().map(|u| (u - u_star).norm()).fold(0.0, f64::max)
    }

    /// `∫_a^b u dx`.
    pub fn integral(&self) -> State {
        let n = self.states[0].len();
        let mut acc = DVector::zeros(n);
        let mut prev = self.a;
        for (k, x) in self.positions().into_iter().enumerate() {
            acc += &self.states[k] * (x - prev);
            prev = x;
        }
        acc += self.states.last().unwrap() * (self.b - prev);
        acc
    }

    /// Rarefaction-piece atoms `(position, σ)` of family `i`.
    pub fn rarefaction_atoms(&self, i: usize) -> Vec<(f64, f64)> {
        self.positions()
            .into_iter()
            .zip(&self.fronts)
            .filter(|(_, f)| f.family == i && f.kind == FrontKind::RarefactionPiece)
            .map(|(x, f)| (x, f.sigma))
            .collect()
    }

    /// Equivalent piecewise-constant profile; coincident fronts collapse.
    pub fn profile(&self) -> Result<PiecewiseProfile> {
        let mut breaks = Vec::new();
        let mut values = vec![self.states[0].clone()];
        for (k, x) in self.positions().into_iter().enumerate() {
            let u = self.states[k + 1].clone();
            if x <= self.a {
                values[0] = u;
            } else if x >= self.b {
                break;
            } else if breaks.last().is_some_and(|&l| x <= l) {
                *values.last_mut().unwrap() = u;
            } else {
                breaks.push(x);
                values.push(u);
            }
        }
        PiecewiseProfile::new(self.a, self.b, breaks, values)
    }

    /// CSV with columns `x_left, x_right, u1..un`, one row per gap.
    pub fn to_csv(&self) -> String {
        let n = self.states[0].len();
        let mut out = String::from("x_left,x_right");
        for k in 1..=n {
            let _ = write!(out, ",u{k}");
        }
        out.push('\n');
        let pos = self.positions();
        for (k, u) in self.states.iter().enumerate() {
            let lo = if k == 0 { self.a } else { pos[k - 1] };
            let hi = if k == pos.len() { self.b } else { pos[k] };
            let _ = write!(out, "{lo:.16e},{hi:.16e}");
            for x in u.iter() {
                let _ = write!(out, ",{x:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serializes")
    }
}
