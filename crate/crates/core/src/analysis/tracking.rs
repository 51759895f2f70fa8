use serde::Serialize;

use crate::error::{Error, Result};
use crate::fronttrack::{EndReason, FrontKind, Side, Simulation};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShockSample {
    pub t: f64,
    pub x: f64,
    pub strength: f64,
    pub lineage: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "type", content = "t")]
pub enum TrackOutcome {
    /// Still a shock at the end of the window.
    Alive,
    Exited(Side, f64),
    /// Cancelled or turned into a rarefaction inside the domain.
    Lost(f64),
}

/// Strength history of one shock followed through interactions and merges.
#[derive(Debug, Clone, Serialize)]
pub struct ShockTrack {
    pub lineage: usize,
    pub samples: Vec<ShockSample>,
    /// `min_{s < t} |σ(t)| / |σ(s)|` over the samples.
    pub min_ratio: f64,
    pub outcome: TrackOutcome,
}

/// Follows `lineage` on `[s, t]`. When the lineage is absorbed by a stronger
/// same-family shock the track continues along the survivor.
pub fn track_shock_strength(sim: &Simulation, lineage: usize, s: f64, t: f64) -> Result<ShockTrack> {
    let archive = sim.archive();
    let mut current = lineage;
    let mut samples: Vec<ShockSample> = Vec::new();
    let mut outcome = TrackOutcome::Alive;
    let mut cursor = s;
    loop {
        let mut segs: Vec<_> = archive
            .iter()
            .filter(|g| g.front.lineage == current && g.t_end > cursor && g.front.t0 <= t)
            .collect();
        segs.sort_by(|p, q| p.front.t0.total_cmp(&q.front.t0));
        if segs.is_empty() && samples.is_empty() {
            return Err(Error::Precondition(format!("lineage {lineage} does not exist on [{s}, {t}]")));
        }
        let mut last_end = None;
        for g in &segs {
            if g.front.kind != FrontKind::Shock {
                outcome = TrackOutcome::Lost(g.front.t0.max(s));
                break;
            }
            let t0 = g.front.t0.max(s);
            let t1 = g.t_end.min(t);
            for tt in [t0, t1] {
                samples.push(ShockSample {
                    t: tt,
                    x: g.front.position(tt),
                    strength: g.front.sigma.abs(),
                    lineage: current,
                });
            }
            last_end = Some((g.t_end, g.end));
        }
        if matches!(outcome, TrackOutcome::Lost(_)) {
            break;
        }
        match last_end {
            Some((te, _)) if te >= t => break,
            Some((te, Some(EndReason::Exit(side)))) => {
                outcome = TrackOutcome::Exited(side, te);
                break;
            }
            Some((te, _)) => {
                let merged = sim
                    .merges()
                    .iter()
                    .find(|m| m.time >= te - 1e-12 && m.absorbed.contains(&current));
                let continued = archive
                    .iter()
                    .any(|g| g.front.lineage == current && g.front.t0 >= te && g.front.t0 <= t);
                if continued {
                    cursor = te;
                    continue;
                }
                match merged {
                    Some(m) => {
                        current = m.survivor;
                        cursor = te;
                    }
                    None => {
                        outcome = TrackOutcome::Lost(te);
                        break;
                    }
                }
            }
            None => {
                outcome = TrackOutcome::Lost(cursor);
                break;
            }
        }
    }
    let mut best = 0.0_f64;
    let mut min_ratio = f64::INFINITY;
    for smp in &samples {
        if best > 0.0 {
            min_ratio = min_ratio.min(smp.strength / best);
        }
        best = best.max(smp.strength);
    }
    Ok(ShockTrack {
        lineage,
        samples,
        min_ratio: if min_ratio.is_finite() { min_ratio } else { 1.0 },
        outcome,
    })
}

/// Lineage of the strongest shock of `family` alive at time `t`.
pub fn strongest_shock_lineage(sim: &Simulation, family: usize, t: f64) -> Option<usize> {
    super::fronts_at(sim, t)
        .into_iter()
        .filter(|(f, _, _)| f.family == family && f.is_shock())
        .max_by(|p, q| p.0.sigma.abs().total_cmp(&q.0.sigma.abs()))
        .map(|(f, _, _)| f.lineage)
}
