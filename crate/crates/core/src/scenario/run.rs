use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{matrix_of, ExperimentKind, Scenario};
use super::report;
use crate::analysis::{
    characteristic_spread, fronts_at, positive_wave_density,
    same_family_sign_compliance, shock_census, track_shock_strength, TrackOutcome,
};
use crate::control::{crossing_time, linear_exact_control, stabilize, steer_constant_states, StabilizeOptions, SteerOptions};
use crate::error::{Error, Result};
use crate::flux_models::{state, FluxModel};
use crate::fronttrack::{calibrate_interaction_constant, Simulation, TrackingOptions};
use crate::linalg::linear_fit;
use crate::riemann::solve_riemann_with;
use crate::wave_curves::{curve_csv, sample_lax_curve};

/// Files and metrics of a finished run, not yet written anywhere.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub files: BTreeMap<String, String>,
    pub metrics: Value,
    /// Invariant violation detected after the run completed.
    pub violation: Option<String>,
}

/// What [`run_scenario`] wrote.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub status: String,
    pub files: Vec<String>,
    pub exit_code: i32,
}

fn tracking(sc: &Scenario) -> TrackingOptions {
    let mut t = TrackingOptions::new(sc.tracking.epsilon);
    t.max_events = sc.tracking.max_events;
    t.riemann.delta = sc.tracking.riemann_radius;
    t
}

/// `ΔV + C₀ΔQ ≤ 10ε` and `ΔQ < 0` over every logged interaction.
#[derive(Debug, Clone, Serialize)]
pub struct UpsilonCheck {
    pub c0: f64,
    pub calibration_max_ratio: f64,
    pub interactions: usize,
    pub max_excess: f64,
    pub tolerance: f64,
    pub violations: usize,
    pub q_not_decreasing: usize,
}

pub fn upsilon_check(sim: &Simulation, seed: u64, samples: usize, safety: f64, epsilon: f64) -> Result<UpsilonCheck> {
    let model = sim.model().clone();
    let center = sim.history().first().map(|_| sim.states()[0].clone()).unwrap_or_else(|| sim.trace(crate::fronttrack::Side::A).clone());
    let radius = 0.5 * sim.options().riemann.delta.min(0.3);
    let cal = calibrate_interaction_constant(model.as_ref(), &center, radius, samples, seed, safety)?;
    let tol = 10.0 * epsilon;
    let mut max_excess = f64::NEG_INFINITY;
    let mut violations = 0;
    let mut q_bad = 0;
    for e in sim.interactions() {
        let ex = e.delta_v() + cal.c0 * e.delta_q();
        max_excess = max_excess.max(ex);
        if ex > tol {
            violations += 1;
        }
        if e.delta_q() >= 0.0 {
            q_bad += 1;
        }
    }
    Ok(UpsilonCheck {
        c0: cal.c0,
        calibration_max_ratio: cal.max_ratio,
        interactions: sim.interactions().len(),
        max_excess: if max_excess.is_finite() { max_excess } else { 0.0 },
        tolerance: tol,
        violations,
        q_not_decreasing: q_bad,
    })
}

fn audit_violation(sim: &Simulation) -> Option<String> {
    let a = sim.shock_audit();
    if a.max_rh_residual > 1e-10 || a.lax_failures > 0 {
        return Some(format!(
            "shock audit failed: max RH residual {:e}, {} Lax failures",
            a.max_rh_residual, a.lax_failures
        ));
    }
    None
}

fn first(v: &mut Option<String>, w: Option<String>) {
    if v.is_none() {
        *v = w;
    }
}

fn common_files(files: &mut BTreeMap<String, String>, sim: &Simulation) {
    files.insert("interactions.csv".into(), report::interactions_csv(sim));
    files.insert("functionals.csv".into(), report::functionals_csv(sim));
}

fn tau_of(sc: &Scenario, model: &dyn FluxModel) -> Result<f64> {
    let bx = sc.control_box()?;
    crossing_time(model, sc.domain.a, sc.domain.b, &bx, sc.control.per_axis, sc.control.speed_floor)
}

fn run_evolve(sc: &Scenario, model: Arc<dyn FluxModel>) -> Result<RunOutcome> {
    let data = sc.initial_profile(model.as_ref())?;
    let mut sim = Simulation::new(model, &data, tracking(sc))?;
    let mut files = BTreeMap::new();
    let e = &sc.evolve;
    let mut tv = Vec::new();
    for k in 0..e.samples {
        let t = e.horizon * k as f64 / (e.samples - 1) as f64;
        let snap = sim.advance_to(t)?;
        tv.push(json!({"t": t, "tv": snap.total_variation(), "fronts": snap.fronts.len()}));
        files.insert(format!("snapshots/snapshot_{k:03}.csv"), snap.to_csv());
    }
    common_files(&mut files, &sim);
    let ups = upsilon_check(&sim, sc.seed, e.calibration_samples, e.safety_factor, sc.tracking.epsilon)?;
    let mut violation = audit_violation(&sim);
    if ups.violations > 0 {
        first(&mut violation, Some(format!("Υ increased beyond 10ε at {} interactions", ups.violations)));
    }
    let metrics = json!({
        "samples": tv,
        "events": sim.event_count(),
        "interactions": sim.interactions().len(),
        "final_fronts": sim.front_count(),
        "dropped_mass": sim.dropped_mass(),
        "shock_audit": sim.shock_audit(),
        "upsilon": ups,
    });
    Ok(RunOutcome { files, metrics, violation })
}

fn run_riemann(sc: &Scenario, model: Arc<dyn FluxModel>) -> Result<RunOutcome> {
    let r = sc.riemann.as_ref().ok_or_else(|| Error::Config("missing [riemann]".into()))?;
    let opts = tracking(sc).riemann;
    let sol = solve_riemann_with(model.as_ref(), &state(&r.left), &state(&r.right), &opts)?;
    let mut files = BTreeMap::new();
    files.insert("riemann.csv".into(), report::riemann_csv(&sol));
    let metrics = json!({
        "sigma": sol.sigma,
        "residual": sol.residual,
        "middle_states": sol.states,
    });
    Ok(RunOutcome { files, metrics, violation: None })
}

fn run_steer(sc: &Scenario, model: Arc<dyn FluxModel>) -> Result<RunOutcome> {
    let s = sc.steer.as_ref().ok_or_else(|| Error::Config("missing [steer]".into()))?;
    let tau = tau_of(sc, model.as_ref())?;
    let opts = SteerOptions {
        tau,
        delta_chain: s.delta_chain,
        tracking: tracking(sc),
    };
    let out = steer_constant_states(model, sc.domain.a, sc.domain.b, &state(&s.from), &state(&s.to), &opts)?;
    let mut files = BTreeMap::new();
    files.insert("plan.json".into(), out.plan.to_json());
    files.insert("snapshots/final.csv".into(), out.simulation.snapshot().to_csv());
    common_files(&mut files, &out.simulation);
    let violation = audit_violation(&out.simulation);
    let metrics = json!({
        "tau": tau,
        "hops": out.hops,
        "horizon": out.horizon,
        "final_sup_distance": out.final_sup_distance,
        "final_fronts": out.final_front_count,
        "shock_audit": out.simulation.shock_audit(),
    });
    Ok(RunOutcome { files, metrics, violation })
}

fn run_stabilize(sc: &Scenario, model: Arc<dyn FluxModel>) -> Result<RunOutcome> {
    let data = sc.initial_profile(model.as_ref())?;
    let tau = tau_of(sc, model.as_ref())?;
    let s = &sc.stabilize;
    let mut opts = StabilizeOptions::new(tau, sc.tracking.epsilon);
    opts.delta0 = s.delta0;
    opts.iterations = s.iterations;
    opts.eps_decay = s.eps_decay;
    opts.floor = s.floor;
    opts.delta_chain = s.delta_chain;
    opts.tracking = tracking(sc);
    let target = state(&s.target);
    let (rec, sim) = stabilize(model, &data, &target, &opts)?;
    let mut files = BTreeMap::new();
    files.insert("contraction.csv".into(), rec.to_csv());
    files.insert("plan.json".into(), rec.plan.to_json());
    files.insert(
        "steps.json".into(),
        serde_json::to_string_pretty(&rec.steps).expect("steps serialize"),
    );
    files.insert("snapshots/final.csv".into(), sim.snapshot().to_csv());
    common_files(&mut files, &sim);
    let mut violation = rec.failure.clone();
    first(&mut violation, audit_violation(&sim));
    let c_hat = rec.rows.iter().filter_map(|r| r.ratio).filter(|r| r.is_finite()).fold(0.0, f64::max);
    let metrics = json!({
        "tau": tau,
        "pre_phase_hops": rec.pre_phase_hops,
        "pre_phase_horizon": rec.pre_phase_horizon,
        "deltas": rec.deltas(),
        "ratios": rec.rows.iter().map(|r| r.ratio).collect::<Vec<_>>(),
        "c_hat": c_hat,
        "halted_at_floor": rec.halted_at_floor,
        "failure": rec.failure,
        "shock_audit": sim.shock_audit(),
    });
    Ok(RunOutcome { files, metrics, violation })
}

fn run_counterexample(sc: &Scenario, model: Arc<dyn FluxModel>) -> Result<RunOutcome> {
    let c = &sc.counterexample;
    let data = sc.initial_profile(model.as_ref())?;
    let mut sim = Simulation::new(model, &data, tracking(sc))?;
    let tv0 = sim.snapshot().total_variation();
    let times: Vec<f64> = (0..c.samples).map(|k| c.horizon * k as f64 / (c.samples - 1) as f64).collect();
    let mut files = BTreeMap::new();
    for (k, &t) in times.iter().enumerate() {
        let snap = sim.advance_to(t)?;
        files.insert(format!("snapshots/snapshot_{k:03}.csv"), snap.to_csv());
    }
    let tv_h = sim.snapshot().total_variation();
    let probe = (sc.domain.a + 2.0 * c.margin, sc.domain.b - 2.0 * c.margin);

    let census = shock_census(&sim, &times, probe, c.census_floor);
    let creations = shock_census(&sim, &[c.horizon], probe, c.creation_floor)[0].creation_count();
    files.insert("census.csv".into(), report::census_csv(&census));

    let mut kappa = Vec::new();
    for fam in 0..2 {
        let reps: Vec<_> = times
            .iter()
            .filter(|&&t| t >= c.density_t_min)
            .map(|&t| positive_wave_density(&crate::analysis::profile_at(&sim, t), fam, c.density_cells, probe))
            .collect();
        let ts: Vec<f64> = reps.iter().map(|r| r.t).collect();
        let ks: Vec<f64> = reps.iter().map(|r| r.kappa_hat).collect();
        let fit = linear_fit(&ts, &ks);
        kappa.push(json!({
            "family": fam + 1,
            "kappa_hat": ks,
            "max_kappa_hat": ks.iter().copied().fold(0.0, f64::max),
            "slope": fit.map(|f| f.slope),
            "slope_stderr": fit.map(|f| f.slope_stderr),
        }));
        files.insert(format!("density_{}.csv", fam + 1), report::density_csv(&reps));
    }

    let mut tracks = Vec::new();
    let mut vanished = 0;
    for (f, _, _) in fronts_at(&sim, 0.0) {
        if f.family == 0 && f.is_shock() && f.sigma.abs() >= c.persistence_threshold {
            let tr = track_shock_strength(&sim, f.lineage, 0.0, c.horizon)?;
            if matches!(tr.outcome, TrackOutcome::Lost(_)) {
                vanished += 1;
            }
            tracks.push(tr);
        }
    }
    let strongest = tracks
        .iter()
        .max_by(|p, q| p.samples[0].strength.total_cmp(&q.samples[0].strength));
    let persistence = strongest.map(|tr| tr.min_ratio);
    files.insert("shock_tracks.csv".into(), report::tracks_csv(&tracks));

    let mut spreads = Vec::new();
    let width = probe.1 - probe.0;
    let h = width / (2.0 * c.spread_pairs.max(1) as f64);
    for k in 0..c.spread_pairs {
        let x = probe.0 + (2 * k) as f64 * h + 0.5 * h;
        let y = x + h;
        let r = characteristic_spread(&sim, 0, c.horizon, x, y)?;
        spreads.push((x, y, r));
    }
    let l_hat = spreads.iter().map(|s| s.2.max_ratio).fold(0.0, f64::max);
    files.insert("spread.csv".into(), report::spread_csv(&spreads));
    common_files(&mut files, &sim);

    let sign = same_family_sign_compliance(&sim, 0);
    let ups = upsilon_check(&sim, sc.seed, sc.evolve.calibration_samples, sc.evolve.safety_factor, sc.tracking.epsilon)?;
    let mut violation = audit_violation(&sim);
    if !sign.all_compliant() {
        first(
            &mut violation,
            Some(format!(
                "{} of {} same-family shock collisions emitted a non-shock opposite wave",
                sign.collisions - sign.compliant,
                sign.collisions
            )),
        );
    }
    if ups.violations > 0 {
        first(&mut violation, Some(format!("Υ increased beyond 10ε at {} interactions", ups.violations)));
    }
    let metrics = json!({
        "probe": [probe.0, probe.1],
        "tv_initial": tv0,
        "tv_horizon": tv_h,
        "tv_ratio": if tv0 > 0.0 { tv_h / tv0 } else { 0.0 },
        "sign_compliance": sign,
        "creation_count": creations,
        "creation_floor": c.creation_floor,
        "creation_count_census_floor": census.last().map(|r| r.creation_count()),
        "census_floor": c.census_floor,
        "largest_gap_family1": census.iter().map(|r| r.largest_gap[0]).collect::<Vec<_>>(),
        "kappa": kappa,
        "persistence_constant": persistence,
        "tracked_shocks": tracks.len(),
        "vanished_shocks": vanished,
        "spread_l_hat": l_hat,
        "events": sim.event_count(),
        "shock_audit": sim.shock_audit(),
        "upsilon": ups,
    });
    Ok(RunOutcome { files, metrics, violation })
}

fn run_linear_control(sc: &Scenario) -> Result<RunOutcome> {
    let l = sc.linear_control.as_ref().ok_or_else(|| Error::Config("missing [linear_control]".into()))?;
    let super::config::ModelConfig::Linear { matrix } = &sc.model else {
        return Err(Error::Config("linear-control needs a linear model".into()));
    };
    let (a, b) = (sc.domain.a, sc.domain.b);
    let phi = l.phi.build(a, b)?;
    let psi = l.psi.build(a, b)?;
    let ctl = linear_exact_control(&matrix_of(matrix), &phi, &psi, l.horizon)?;
    let end = ctl.profile_at(l.horizon)?;
    let mut err = 0.0_f64;
    for k in 0..psi.values.len() {
        let (lo, hi) = psi.piece(k);
        err = err.max((end.value_at(0.5 * (lo + hi)) - psi.value(k)).amax());
    }
    let mut files = BTreeMap::new();
    files.insert("boundary_data.csv".into(), report::boundary_data_csv(&ctl));
    files.insert("snapshots/initial.csv".into(), ctl.profile_at(0.0)?.to_csv());
    files.insert("snapshots/terminal.csv".into(), end.to_csv());
    let violation = (err > 1e-12).then(|| format!("terminal profile misses the target by {err:e}"));
    let metrics = json!({
        "tau": ctl.tau,
        "horizon": ctl.horizon,
        "speeds": ctl.speeds,
        "terminal_max_error": err,
        "terminal_breaks_match": end.breaks == psi.breaks,
    });
    Ok(RunOutcome { files, metrics, violation })
}

/// Runs a validated scenario in memory.
pub fn execute(sc: &Scenario) -> Result<RunOutcome> {
    let model = sc.model()?;
    match sc.experiment {
        ExperimentKind::Evolve => run_evolve(sc, model),
        ExperimentKind::Riemann => run_riemann(sc, model),
        ExperimentKind::Steer => run_steer(sc, model),
        ExperimentKind::Stabilize => run_stabilize(sc, model),
        ExperimentKind::Counterexample => run_counterexample(sc, model),
        ExperimentKind::LinearControl => run_linear_control(sc),
    }
}

fn strength_parametrization(model: &dyn FluxModel) -> &'static str {
    if model.chart().is_some() {
        "riemann-coordinate jump"
    } else {
        "unit-eigenvector arclength"
    }
}

fn manifest(sc: &Scenario, out: &RunOutcome, files: &[String], model: &dyn FluxModel) -> String {
    let v = json!({
        "schema": "hyperctl.manifest/1",
        "name": sc.name,
        "experiment": sc.experiment.as_str(),
        "status": if out.violation.is_some() { "invariant-violation" } else { "ok" },
        "violation": out.violation,
        "version": env!("CARGO_PKG_VERSION"),
        "strength_parametrization": strength_parametrization(model),
        "config": sc,
        "files": files,
        "metrics": out.metrics,
    });
    serde_json::to_string_pretty(&v).expect("manifest serializes") + "\n"
}

/// Runs `sc` and writes every artifact plus `manifest.json` under `out_dir`.
///
/// Nothing is written when the run itself fails. An invariant violation
/// found after the run still writes the artifacts, then returns the error.
pub fn run_scenario(sc: &Scenario, out_dir: &Path) -> Result<RunSummary> {
    let diags = sc.diagnostics();
    if !diags.is_empty() {
        return Err(Error::Config(diags.join("; ")));
    }
    let model = sc.model()?;
    let outcome = execute(sc)?;
    let mut names: Vec<String> = outcome.files.keys().cloned().collect();
    names.push("manifest.json".into());
    names.sort();
    std::fs::create_dir_all(out_dir)?;
    for (name, body) in &outcome.files {
        let path = out_dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, body)?;
    }
    std::fs::write(out_dir.join("manifest.json"), manifest(sc, &outcome, &names, model.as_ref()))?;
    match outcome.violation {
        Some(v) => Err(Error::Invariant(v)),
        None => Ok(RunSummary {
            status: "ok".into(),
            files: names,
            exit_code: 0,
        }),
    }
}

/// Lax-curve samples for the `[curves]` section.
pub fn curves(sc: &Scenario) -> Result<String> {
    let c = sc.curves.as_ref().ok_or_else(|| Error::Config("missing [curves] section".into()))?;
    let model = sc.model()?;
    let sig: Vec<f64> = (0..c.samples)
        .map(|k| c.sigma_min + (c.sigma_max - c.sigma_min) * k as f64 / (c.samples - 1) as f64)
        .collect();
    let pts = sample_lax_curve(model.as_ref(), &state(&c.state), c.family - 1, &sig)?;
    Ok(curve_csv(&pts))
}

/// Riemann fan of the `[riemann]` section as aligned text, CSV and JSON.
pub fn riemann_table(sc: &Scenario) -> Result<(String, String, String)> {
    let r = sc.riemann.as_ref().ok_or_else(|| Error::Config("missing [riemann] section".into()))?;
    let model = sc.model()?;
    let sol = solve_riemann_with(model.as_ref(), &state(&r.left), &state(&r.right), &tracking(sc).riemann)?;
    let js = serde_json::to_string_pretty(&sol).expect("solution serializes") + "\n";
    Ok((sol.to_table(), report::riemann_csv(&sol), js))
}
