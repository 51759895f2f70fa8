//! Glimm functionals, wave measures and calibration of the interaction constant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::snapshot::Snapshot;
use super::types::{Front, Functionals};
use crate::error::Result;
use crate::flux_models::{FluxModel, State};
use crate::riemann::{compose, solve_riemann_with, RiemannOptions};

/// Whether `left` (located left of `right`) and `right` approach: a faster
/// family on the left, or the same family with at least one shock.
pub fn approaching(left: &Front, right: &Front) -> bool {
    left.family > right.family || (left.family == right.family && (left.is_shock() || right.is_shock()))
}

/// `Q = Σ_{approaching α<β} |σ_α σ_β|` over position-ordered fronts.
pub fn interaction_potential(fronts: &[Front]) -> f64 {
    let mut q = 0.0;
    for (k, l) in fronts.iter().enumerate() {
        for r in &fronts[k + 1..] {
            if approaching(l, r) {
                q += (l.sigma * r.sigma).abs();
            }
        }
    }
    q
}

/// `(V, Q, TV)` of a front list with its gap states.
pub fn glimm_functionals(fronts: &[Front], states: &[State]) -> Functionals {
    Functionals {
        v: fronts.iter().map(|f| f.sigma.abs()).sum(),
        q: interaction_potential(fronts),
        tv: states.windows(2).map(|w| (&w[1] - &w[0]).norm()).sum(),
    }
}

/// Atomic measures `μ^i = Σ σ_{α,i} δ_{x_α}` of the `i`-waves.
#[derive(Debug, Clone, Serialize)]
pub struct WaveMeasure {
    /// `atoms[i]` lists `(position, signed size)` for family `i`.
    pub atoms: Vec<Vec<(f64, f64)>>,
}

impl WaveMeasure {
    pub fn positive_mass(&self, i: usize) -> f64 {
        self.atoms[i].iter().map(|&(_, s)| s.max(0.0)).sum()
    }

    pub fn negative_mass(&self, i: usize) -> f64 {
        self.atoms[i].iter().map(|&(_, s)| (-s).max(0.0)).sum()
    }

    /// `|μ^i| = μ^{i+} + μ^{i−}`.
    pub fn total_mass(&self, i: usize) -> f64 {
        self.atoms[i].iter().map(|&(_, s)| s.abs()).sum()
    }
}

/// Wave measures of a snapshot, from a Riemann solve at every jump.
pub fn wave_measures(model: &dyn FluxModel, snap: &Snapshot, opts: &RiemannOptions) -> Result<WaveMeasure> {
    let n = model.dim();
    let mut atoms = vec![Vec::new(); n];
    for (k, x) in snap.positions().into_iter().enumerate() {
        let sol = solve_riemann_with(model, &snap.states[k], &snap.states[k + 1], opts)?;
        for w in sol.active_waves() {
            atoms[w.family].push((x, w.sigma));
        }
    }
    Ok(WaveMeasure { atoms })
}

/// Empirical constant `C₀` making `ΔV + C₀ ΔQ ≤ 0` for pairwise interactions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CalibrationReport {
    pub samples: usize,
    /// Largest observed `ΔV / |σ_α σ_β|`.
    pub max_ratio: f64,
    pub safety_factor: f64,
    pub c0: f64,
}

/// Samples random approaching pairs of waves around `center` with strengths up
/// to `radius`, solves the interaction and records `ΔV / |σ_α σ_β|`. The
/// reported constant is the maximum times `safety_factor` (at least 1).
pub fn calibrate_interaction_constant(
    model: &dyn FluxModel,
    center: &State,
    radius: f64,
    samples: usize,
    seed: u64,
    safety_factor: f64,
) -> Result<CalibrationReport> {
    let n = model.dim();
    let opts = RiemannOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = 0.0_f64;
    let mut done = 0;
    while done < samples {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i < j {
            continue;
        }
        let mut sa: f64 = rng.random_range(-radius..radius);
        let mut sb: f64 = rng.random_range(-radius..radius);
        if i == j && sa > 0.0 && sb > 0.0 {
            if rng.random_bool(0.5) {
                sa = -sa;
            } else {
                sb = -sb;
            }
        }
        let mut base = center.clone();
        for c in base.iter_mut() {
            *c += rng.random_range(-radius..radius) * 0.5;
        }
        if !model.admits(&base) {
            continue;
        }
        let Ok(chain) = compose(model, &base, &[i, j], &[sa, sb]) else {
            continue;
        };
        let sol = solve_riemann_with(model, &chain[0], &chain[2], &opts)?;
        let v_out: f64 = sol.sigma.iter().map(|s| s.abs()).sum();
        let dv = v_out - sa.abs() - sb.abs();
        let prod = (sa * sb).abs();
        if prod > 1e-14 {
            max_ratio = max_ratio.max(dv / prod);
        }
        done += 1;
    }
    let factor = safety_factor.max(1.0);
    Ok(CalibrationReport {
        samples,
        max_ratio,
        safety_factor: factor,
        c0: (max_ratio * factor).max(1.0),
    })
}
