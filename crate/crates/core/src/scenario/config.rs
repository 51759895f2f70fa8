use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::analysis::dense_shock_initial_data;
use crate::error::{Error, Result};
use crate::flux_models::{state, DomainBox, FluxModel, IsentropicGas, LinearFlux, QuadraticTable, State};
use crate::profile::PiecewiseProfile;
use crate::wave_curves::lax_curve;

pub const SCHEMA: &str = "hyperctl.scenario/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Evolve,
    Riemann,
    Steer,
    Stabilize,
    Counterexample,
    LinearControl,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Evolve => "evolve",
            ExperimentKind::Riemann => "riemann",
            ExperimentKind::Steer => "steer",
            ExperimentKind::Stabilize => "stabilize",
            ExperimentKind::Counterexample => "counterexample",
            ExperimentKind::LinearControl => "linear-control",
        }
    }
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    Gas {
        #[serde(default = "one")]
        k: f64,
        #[serde(default = "two")]
        gamma: f64,
    },
    Linear {
        matrix: Vec<Vec<f64>>,
    },
    CustomTable {
        offset: Vec<f64>,
        linear: Vec<Vec<f64>>,
        quadratic: Vec<Vec<Vec<f64>>>,
        negative_families: usize,
        domain_lo: Vec<f64>,
        domain_hi: Vec<f64>,
    },
}

impl ModelConfig {
    pub fn build(&self) -> Result<Arc<dyn FluxModel>> {
        Ok(match self {
            ModelConfig::Gas { k, gamma } => Arc::new(IsentropicGas::new(*k, *gamma)?),
            ModelConfig::Linear { matrix } => Arc::new(LinearFlux::from_rows(matrix)?),
            ModelConfig::CustomTable {
                offset,
                linear,
                quadratic,
                negative_families,
                domain_lo,
                domain_hi,
            } => {
                if domain_lo.len() != domain_hi.len() {
                    return Err(Error::Config("custom-table domain bounds differ in length".into()));
                }
                Arc::new(QuadraticTable::new(
                    offset.clone(),
                    linear.clone(),
                    quadratic.clone(),
                    *negative_families,
                    DomainBox::new(domain_lo.clone(), domain_hi.clone()),
                )?)
            }
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub a: f64,
    pub b: f64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self { a: 0.0, b: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    #[serde(default)]
    pub breaks: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl ProfileConfig {
    pub fn build(&self, a: f64, b: f64) -> Result<PiecewiseProfile> {
        PiecewiseProfile::new(a, b, self.breaks.clone(), self.values.iter().map(|v| state(v)).collect())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialData {
    Constant {
        state: Vec<f64>,
    },
    Jumps {
        breaks: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
    /// First-family shocks at dyadic positions.
    DenseShocks {
        left: Vec<f64>,
        n: usize,
        budget: f64,
    },
    /// `n` equal rarefactions of one family (1-based) at evenly spaced points.
    RarefactionOnly {
        left: Vec<f64>,
        family: usize,
        n: usize,
        budget: f64,
    },
}

impl InitialData {
    pub fn build(&self, model: &dyn FluxModel, a: f64, b: f64) -> Result<PiecewiseProfile> {
        match self {
            InitialData::Constant { state: s } => PiecewiseProfile::constant(a, b, &state(s)),
            InitialData::Jumps { breaks, values } => {
                PiecewiseProfile::new(a, b, breaks.clone(), values.iter().map(|v| state(v)).collect())
            }
            InitialData::DenseShocks { left, n, budget } => {
                dense_shock_initial_data(model, &state(left), *n, *budget, a, b)
            }
            InitialData::RarefactionOnly {
                left,
                family,
                n,
                budget,
            } => {
                let mut values: Vec<State> = vec![state(left)];
                for _ in 0..*n {
                    let next = lax_curve(model, values.last().unwrap(), family - 1, budget / *n as f64)?.state;
                    values.push(next);
                }
                let breaks = (1..=*n).map(|k| a + (b - a) * k as f64 / (*n + 1) as f64).collect();
                PiecewiseProfile::new(a, b, breaks, values)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackingConfig {
    pub epsilon: f64,
    pub max_events: usize,
    /// Largest admissible `|Δw|` of a single Riemann problem.
    pub riemann_radius: f64,
}

impl Default for TrackingConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            max_events: 2_000_000,
            riemann_radius: 0.3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlConfig {
    /// Box over which the crossing time is computed.
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
    pub per_axis: usize,
    pub speed_floor: f64,
}

impl Default for ControlConfig {
    fn default() -> Self {
        Self {
            box_lo: Vec::new(),
            box_hi: Vec::new(),
            per_axis: 21,
            speed_floor: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    pub horizon: f64,
    /// Number of equally spaced snapshot times, both ends included.
    pub samples: usize,
    pub calibration_samples: usize,
    pub safety_factor: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            horizon: 1.0,
            samples: 5,
            calibration_samples: 2000,
            safety_factor: 2.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiemannConfig {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteerConfig {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    #[serde(default = "chain_step")]
    pub delta_chain: f64,
}

fn chain_step() -> f64 {
    0.05
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilizeConfig {
    pub target: Vec<f64>,
    pub iterations: usize,
    pub delta0: f64,
    pub eps_decay: f64,
    pub floor: f64,
    pub delta_chain: f64,
}

impl Default for StabilizeConfig {
    fn default() -> Self {
        Self {
            target: Vec::new(),
            iterations: 4,
            delta0: 0.2,
            eps_decay: 0.25,
            floor: 1e-9,
            delta_chain: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CounterexampleConfig {
    pub horizon: f64,
    pub samples: usize,
    /// Probe interval is `[a + 2·margin, b − 2·margin]`.
    pub margin: f64,
    pub census_floor: f64,
    /// Floor for counting opposite-family shock creations.
    pub creation_floor: f64,
    pub density_cells: usize,
    pub density_t_min: f64,
    /// Same-family characteristic pairs for the spread statistic.
    pub spread_pairs: usize,
    /// Tracked shocks at least this strong must not vanish.
    pub persistence_threshold: f64,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self {
            horizon: 2.0,
            samples: 9,
            margin: 0.0,
            census_floor: 1e-6,
            creation_floor: 1e-12,
            density_cells: 64,
            density_t_min: 0.2,
            spread_pairs: 8,
            persistence_threshold: 0.005,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearControlConfig {
    pub phi: ProfileConfig,
    pub psi: ProfileConfig,
    pub horizon: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvesConfig {
    pub state: Vec<f64>,
    /// 1-based family index.
    pub family: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub samples: usize,
}

/// A complete, versioned scenario description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: String,
    #[serde(default)]
    pub name: String,
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    pub model: ModelConfig,
    #[serde(default)]
    pub domain: DomainConfig,
    #[serde(default)]
    pub initial: Option<InitialData>,
    #[serde(default)]
    pub tracking: TrackingConfig,
    #[serde(default)]
    pub control: ControlConfig,
    #[serde(default)]
    pub evolve: EvolveConfig,
    #[serde(default)]
    pub riemann: Option<RiemannConfig>,
    #[serde(default)]
    pub steer: Option<SteerConfig>,
    #[serde(default)]
    pub stabilize: StabilizeConfig,
    #[serde(default)]
    pub counterexample: CounterexampleConfig,
    #[serde(default)]
    pub linear_control: Option<LinearControlConfig>,
    #[serde(default)]
    pub curves: Option<CurvesConfig>,
}

impl Scenario {
    /// Parses and validates; every diagnostic is folded into one config error.
    pub fn from_toml(text: &str) -> Result<Self> {
        let sc: Scenario = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        let diags = sc.diagnostics();
        if !diags.is_empty() {
            return Err(Error::Config(diags.join("; ")));
        }
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn model(&self) -> Result<Arc<dyn FluxModel>> {
        self.model.build()
    }

    pub fn initial_profile(&self, model: &dyn FluxModel) -> Result<PiecewiseProfile> {
        let init = self
            .initial
            .as_ref()
            .ok_or_else(|| Error::Config("missing [initial] section".into()))?;
        init.build(model, self.domain.a, self.domain.b)
    }

    pub fn control_box(&self) -> Result<DomainBox> {
        let c = &self.control;
        if c.box_lo.is_empty() || c.box_lo.len() != c.box_hi.len() {
            return Err(Error::Config("control.box_lo and control.box_hi are required and must match".into()));
        }
        Ok(DomainBox::new(c.box_lo.clone(), c.box_hi.clone()))
    }

    /// Range and consistency checks that do not need a run.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut d = Vec::new();
        if self.schema != SCHEMA {
            d.push(format!("schema must be \"{SCHEMA}\", found \"{}\"", self.schema));
        }
        let n = match &self.model {
            ModelConfig::Gas { k, gamma } => {
                if !(*gamma > 1.0 && *gamma < 3.0) {
                    d.push(format!("model.gamma = {gamma} is outside the admissible range 1 < gamma < 3"));
                }
                if !(*k > 0.0) {
                    d.push(format!("model.k = {k} must be positive"));
                }
                2
            }
            ModelConfig::Linear { matrix } => {
                let n = matrix.len();
                if n == 0 || matrix.iter().any(|r| r.len() != n) {
                    d.push("model.matrix must be square and non-empty".into());
                }
                n
            }
            ModelConfig::CustomTable { offset, .. } => offset.len(),
        };
        let dim_ok = |v: &Vec<f64>| v.len() == n;
        if !(self.domain.a < self.domain.b) || !self.domain.a.is_finite() || !self.domain.b.is_finite() {
            d.push(format!("domain must satisfy a < b, got [{}, {}]", self.domain.a, self.domain.b));
        }
        let t = &self.tracking;
        if !(t.epsilon > 0.0 && t.epsilon.is_finite()) {
            d.push(format!("tracking.epsilon = {} must be positive", t.epsilon));
        }
        if !(t.riemann_radius > 0.0) {
            d.push(format!("tracking.riemann_radius = {} must be positive", t.riemann_radius));
        }
        if t.max_events == 0 {
            d.push("tracking.max_events must be at least 1".into());
        }
        match &self.initial {
            Some(InitialData::Constant { state }) if !dim_ok(state) => {
                d.push(format!("initial.state must have {n} components"))
            }
            Some(InitialData::Jumps { breaks, values }) => {
                if values.len() != breaks.len() + 1 || !values.iter().all(dim_ok) {
                    d.push(format!("initial.values needs breaks+1 states of {n} components"));
                }
            }
            Some(InitialData::DenseShocks { left, n: count, budget }) => {
                if !dim_ok(left) || n != 2 {
                    d.push("dense-shocks data needs a 2×2 model and a 2-component left state".into());
                }
                if *count == 0 || !(*budget > 0.0) {
                    d.push("dense-shocks needs n ≥ 1 and a positive budget".into());
                }
            }
            Some(InitialData::RarefactionOnly {
                left,
                family,
                n: count,
                budget,
            }) if !dim_ok(left) || *family == 0 || *family > n || *count == 0 || !(*budget > 0.0) => {
                d.push(format!(
                    "rarefaction-only needs a {n}-component left state, 1 ≤ family ≤ {n}, n ≥ 1, budget > 0"
                ));
            }
            _ => {}
        }
        let needs_initial = matches!(
            self.experiment,
            ExperimentKind::Evolve | ExperimentKind::Stabilize | ExperimentKind::Counterexample
        );
        if needs_initial && self.initial.is_none() {
            d.push(format!("experiment {} needs an [initial] section", self.experiment.as_str()));
        }
        let needs_box = matches!(self.experiment, ExperimentKind::Steer | ExperimentKind::Stabilize);
        if needs_box {
            let c = &self.control;
            if !dim_ok(&c.box_lo) || !dim_ok(&c.box_hi) || c.box_lo.iter().zip(&c.box_hi).any(|(l, h)| !(l < h)) {
                d.push(format!("control.box_lo < control.box_hi with {n} components each is required"));
            }
            if c.speed_floor < 0.0 {
                d.push("control.speed_floor must be non-negative".into());
            }
        }
        match self.experiment {
            ExperimentKind::Evolve => {
                if !(self.evolve.horizon > 0.0) {
                    d.push("evolve.horizon must be positive".into());
                }
                if self.evolve.samples < 2 {
                    d.push("evolve.samples must be at least 2".into());
                }
            }
            ExperimentKind::Riemann => match &self.riemann {
                Some(r) if dim_ok(&r.left) && dim_ok(&r.right) => {}
                _ => d.push(format!("[riemann] with {n}-component left and right states is required")),
            },
            ExperimentKind::Steer => match &self.steer {
                Some(s) if dim_ok(&s.from) && dim_ok(&s.to) && s.delta_chain > 0.0 => {}
                _ => d.push(format!("[steer] needs {n}-component from/to and a positive delta_chain")),
            },
            ExperimentKind::Stabilize => {
                let s = &self.stabilize;
                if !dim_ok(&s.target) {
                    d.push(format!("stabilize.target must have {n} components"));
                }
                if !(s.delta0 > 0.0) || !(s.eps_decay > 0.0 && s.eps_decay <= 1.0) || !(s.floor >= 0.0) {
                    d.push("stabilize needs delta0 > 0, 0 < eps_decay ≤ 1 and floor ≥ 0".into());
                }
                if !(s.delta_chain > 0.0) {
                    d.push("stabilize.delta_chain must be positive".into());
                }
            }
            ExperimentKind::Counterexample => {
                let c = &self.counterexample;
                if n != 2 {
                    d.push("counterexample needs a 2×2 model".into());
                }
                if !(c.horizon > 0.0) || c.samples < 2 || c.density_cells == 0 {
                    d.push("counterexample needs horizon > 0, samples ≥ 2, density_cells ≥ 1".into());
                }
                if !(c.margin >= 0.0) || 4.0 * c.margin >= self.domain.b - self.domain.a {
                    d.push("counterexample.margin must leave a non-empty probe interval".into());
                }
                if c.census_floor < 0.0 || c.creation_floor < 0.0 {
                    d.push("census floors must be non-negative".into());
                }
            }
            ExperimentKind::LinearControl => {
                if !matches!(self.model, ModelConfig::Linear { .. }) {
                    d.push("linear-control needs a linear model".into());
                }
                match &self.linear_control {
                    Some(l) => {
                        for (name, p) in [("phi", &l.phi), ("psi", &l.psi)] {
                            if p.values.len() != p.breaks.len() + 1 || !p.values.iter().all(dim_ok) {
                                d.push(format!("linear_control.{name} needs breaks+1 states of {n} components"));
                            }
                        }
                        if !(l.horizon > 0.0) {
                            d.push("linear_control.horizon must be positive".into());
                        }
                    }
                    None => d.push("[linear_control] section is required".into()),
                }
            }
        }
        if let Some(c) = &self.curves {
            if !dim_ok(&c.state) || c.family == 0 || c.family > n || c.samples < 2 || !(c.sigma_min < c.sigma_max) {
                d.push("[curves] needs a valid state, 1 ≤ family ≤ n, samples ≥ 2, sigma_min < sigma_max".into());
            }
        }
        d
    }
}

/// Diagnostics for a config file without running it; empty means valid.
pub fn validate_config(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)?;
    Ok(match toml::from_str::<Scenario>(&text) {
        Ok(sc) => sc.diagnostics(),
        Err(e) => vec![e.message().to_string()],
    })
}

pub(crate) fn matrix_of(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}
