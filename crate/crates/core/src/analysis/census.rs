use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux_models::{FluxModel, State};
use crate::fronttrack::{FrontKind, Simulation};
use crate::profile::PiecewiseProfile;
use crate::wave_curves::shock_curve;

/// A same-family interaction that emitted an opposite-family shock.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CreationEvent {
    pub t: f64,
    pub x: f64,
    pub sigma: f64,
    pub interaction: usize,
}

/// Shocks present at one time, per family.
#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub t: f64,
    pub probe: (f64, f64),
    pub floor: f64,
    /// `shocks[i]` lists `(x, σ)` of family-`i` shocks inside the probe with `|σ| > floor`.
    pub shocks: Vec<Vec<(f64, f64)>>,
    /// Largest empty sub-interval of the probe between family-`i` shocks (probe edges included).
    pub largest_gap: Vec<f64>,
    pub total_variation: f64,
    /// Cumulative creation events of second-family shocks up to `t`.
    pub creations: Vec<CreationEvent>,
}

impl CensusReport {
    pub fn creation_count(&self) -> usize {
        self.creations.len()
    }
}

fn creation_events(sim: &Simulation, floor: f64) -> Vec<CreationEvent> {
    sim.interactions()
        .iter()
        .filter(|e| e.incoming.len() >= 2 && e.incoming.iter().all(|w| w.family == 0))
        .filter_map(|e| {
            e.outgoing
                .iter()
                .filter(|w| w.family == 1 && w.kind == FrontKind::Shock && w.sigma < -floor)
                .map(|w| w.sigma)
                .reduce(f64::min)
                .map(|sigma| CreationEvent {
                    t: e.time,
                    x: e.x,
                    sigma,
                    interaction: e.index,
                })
        })
        .collect()
}

/// Shock census of a 2×2 run at the requested times.
pub fn shock_census(sim: &Simulation, times: &[f64], probe: (f64, f64), floor: f64) -> Vec<CensusReport> {
    let n = sim.model().dim();
    let created = creation_events(sim, floor);
    times
        .iter()
        .map(|&t| {
            let snap = super::profile_at(sim, t);
            let mut shocks = vec![Vec::new(); n];
            for (x, f) in snap.positions().into_iter().zip(&snap.fronts) {
                if f.is_shock() && f.sigma.abs() > floor && x >= probe.0 && x <= probe.1 {
                    shocks[f.family].push((x, f.sigma));
                }
            }
            let largest_gap = shocks
                .iter()
                .map(|list| {
                    let mut edges = vec![probe.0];
                    edges.extend(list.iter().map(|p| p.0));
                    edges.push(probe.1);
                    edges.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
                })
                .collect();
            CensusReport {
                t,
                probe,
                floor,
                shocks,
                largest_gap,
                total_variation: snap.total_variation(),
                creations: created.iter().copied().filter(|c| c.t <= t).collect(),
            }
        })
        .collect()
}

/// Sign rule for collisions of shocks of one family.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct SignCompliance {
    pub collisions: usize,
    /// Collisions whose opposite-family outgoing wave is a shock (`σ < 0`).
    pub compliant: usize,
    /// Largest opposite-family strength seen, the worst offender when positive.
    pub max_opposite_sigma: Option<f64>,
}

impl SignCompliance {
    pub fn all_compliant(&self) -> bool {
        self.collisions == self.compliant
    }
}

/// Checks every logged collision of two or more `family` shocks of a 2×2 run.
pub fn same_family_sign_compliance(sim: &Simulation, family: usize) -> SignCompliance {
    let other = 1 - family.min(1);
    let mut out = SignCompliance::default();
    for e in sim.interactions().iter().filter(|e| e.all_incoming_shocks_of(family)) {
        out.collisions += 1;
        let s = e.raw_sigma[other];
        if s < 0.0 {
            out.compliant += 1;
        }
        out.max_opposite_sigma = Some(out.max_opposite_sigma.map_or(s, |m: f64| m.max(s)));
    }
    out
}

/// `n` first-family shocks at dyadic positions on `[a, b]`, left state `left`.
///
/// Level `ℓ` holds the positions `a + (2j+1)(b−a)/2^{ℓ+1}`; levels are filled
/// in order and a jump at level `ℓ` has strength proportional to `2^{−ℓ}`.
/// Strengths (in the curve parameter) sum to `budget`.
pub fn dense_shock_initial_data(
    model: &dyn FluxModel,
    left: &State,
    n: usize,
    budget: f64,
    a: f64,
    b: f64,
) -> Result<PiecewiseProfile> {
    if model.dim() != 2 {
        return Err(Error::Precondition("dense shock data needs a 2×2 model".into()));
    }
    if n == 0 || !(budget > 0.0) || !(b > a) {
        return Err(Error::Precondition(format!(
            "need n ≥ 1, positive budget and a < b (got n = {n}, budget = {budget})"
        )));
    }
    if budget > model.curve_radius() {
        return Err(Error::RadiusExceeded {
            size: budget,
            radius: model.curve_radius(),
        });
    }
    let mut placed: Vec<(f64, u32)> = Vec::with_capacity(n);
    let mut level = 0u32;
    'fill: loop {
        let count = 1usize << level;
        for j in 0..count {
            if placed.len() == n {
                break 'fill;
            }
            let x = a + (2 * j + 1) as f64 * (b - a) / (2 * count) as f64;
            placed.push((x, level));
        }
        level += 1;
    }
    placed.sort_by(|p, q| p.0.total_cmp(&q.0));
    let weight: f64 = placed.iter().map(|p| 0.5f64.powi(p.1 as i32)).sum();
    let s0 = budget / weight;
    let mut values = vec![left.clone()];
    for &(_, lv) in &placed {
        let s = s0 * 0.5f64.powi(lv as i32);
        let next = shock_curve(model, values.last().unwrap(), 0, -s)?.state;
        values.push(next);
    }
    PiecewiseProfile::new(a, b, placed.iter().map(|p| p.0).collect(), values)
}
