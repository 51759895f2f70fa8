use serde::Serialize;

use crate::fronttrack::Snapshot;

/// Binned density of positive (rarefaction) wave mass of one family.
#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    pub t: f64,
    pub family: usize,
    pub probe: (f64, f64),
    /// `μ^{i+}(cell) / |cell|` on a uniform grid of the probe interval.
    pub densities: Vec<f64>,
    pub max_density: f64,
    /// `t · max_density`.
    pub kappa_hat: f64,
}

impl DensityReport {
    pub fn cell_width(&self) -> f64 {
        (self.probe.1 - self.probe.0) / self.densities.len() as f64
    }
}

/// Bins the rarefaction-piece atoms of `family` inside `probe` into `cells` cells.
pub fn positive_wave_density(snapshot: &Snapshot, family: usize, cells: usize, probe: (f64, f64)) -> DensityReport {
    let cells = cells.max(1);
    let (lo, hi) = probe;
    let width = (hi - lo) / cells as f64;
    let mut mass = vec![0.0; cells];
    for (x, s) in snapshot.rarefaction_atoms(family) {
        if s > 0.0 && x >= lo && x <= hi {
            let k = (((x - lo) / width) as usize).min(cells - 1);
            mass[k] += s;
        }
    }
    let densities: Vec<f64> = mass.iter().map(|m| m / width).collect();
    let max_density = densities.iter().copied().fold(0.0, f64::max);
    DensityReport {
        t: snapshot.time,
        family,
        probe,
        densities,
        max_density,
        kappa_hat: snapshot.time * max_density,
    }
}
