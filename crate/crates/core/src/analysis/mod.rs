//! Diagnostics on finished or running simulations: positive-wave density,
//! shock persistence, backward characteristics and the shock census.

mod census;
mod characteristics;
mod density;
mod tracking;

use crate::fronttrack::{Front, Side, Simulation, Snapshot};
use crate::flux_models::State;

pub use census::{
    dense_shock_initial_data, same_family_sign_compliance, shock_census, CensusReport, CreationEvent, SignCompliance,
};
pub use characteristics::{backward_characteristic, characteristic_spread, CharacteristicPath, PathExit, SpreadReport};
pub use density::{positive_wave_density, DensityReport};
pub use tracking::{strongest_shock_lineage, track_shock_strength, ShockSample, ShockTrack, TrackOutcome};

/// Fronts alive at `t` (born at or before, ending strictly after) with
/// their own gap states, sorted left to right.
pub(crate) fn fronts_at(sim: &Simulation, t: f64) -> Vec<(Front, State, State)> {
    let mut out: Vec<(Front, State, State)> = sim
        .archive()
        .iter()
        .filter(|s| s.front.t0 <= t && t < s.t_end)
        .map(|s| (s.front.clone(), s.left_state(), s.right_state()))
        .collect();
    out.sort_by(|p, q| {
        p.0.position(t)
            .total_cmp(&q.0.position(t))
            .then(p.0.speed.total_cmp(&q.0.speed))
    });
    out
}

/// Value of the trace at `side` in force at time `t`.
pub(crate) fn trace_at(sim: &Simulation, side: Side, t: f64) -> State {
    let line = sim.trace_timeline(side);
    let k = line.partition_point(|(s, _)| *s <= t);
    line[k.saturating_sub(1)].1.clone()
}

/// Reconstructs the profile at any time `t ≤ sim.time()` from the archive.
pub fn profile_at(sim: &Simulation, t: f64) -> Snapshot {
    let (a, b) = sim.interval();
    let alive = fronts_at(sim, t);
    let mut states = Vec::with_capacity(alive.len() + 1);
    match alive.first() {
        Some((_, l, _)) => states.push(l.clone()),
        None => states.push(trace_at(sim, Side::A, t)),
    }
    let mut fronts = Vec::with_capacity(alive.len());
    for (f, _, r) in alive {
        fronts.push(f);
        states.push(r);
    }
    Snapshot::new(t, a, b, fronts, states)
}
