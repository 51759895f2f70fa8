use nalgebra::DVector;
use serde::Serialize;

use crate::flux_models::State;
use crate::riemann::RiemannOptions;
use crate::wave_curves::WaveKind;

/// Boundary point of the interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::A => "a",
            Side::B => "b",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrontKind {
    Shock,
    RarefactionPiece,
    Contact,
}

impl FrontKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FrontKind::Shock => "shock",
            FrontKind::RarefactionPiece => "rarefaction-piece",
            FrontKind::Contact => "contact",
        }
    }

    pub(crate) fn from_wave(kind: WaveKind) -> Self {
        match kind {
            WaveKind::Shock => FrontKind::Shock,
            WaveKind::Rarefaction => FrontKind::RarefactionPiece,
            WaveKind::Contact => FrontKind::Contact,
        }
    }
}

/// Where a front was born.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "type", content = "at")]
pub enum Origin {
    Initial,
    Interaction(usize),
    Boundary(Side),
}

/// A straight discontinuity `x(t) = x0 + speed (t − t0)` between two constant states.
#[derive(Debug, Clone, Serialize)]
pub struct Front {
    pub id: usize,
    /// Zero-based family index.
    pub family: usize,
    pub kind: FrontKind,
    pub sigma: f64,
    pub speed: f64,
    pub generation: u32,
    /// Identifier of the wave this front continues; equals `id` for fresh waves.
    pub lineage: usize,
    pub x0: f64,
    pub t0: f64,
    pub origin: Origin,
}

impl Front {
    pub fn position(&self, t: f64) -> f64 {
        self.x0 + self.speed * (t - self.t0)
    }

    pub fn is_shock(&self) -> bool {
        self.kind == FrontKind::Shock
    }
}

/// Why a front stopped existing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "type", content = "at")]
pub enum EndReason {
    Interaction(usize),
    Exit(Side),
}

/// Archived life of a front.
#[derive(Debug, Clone, Serialize)]
pub struct Segment {
    pub front: Front,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub t_end: f64,
    pub end: Option<EndReason>,
}

impl Segment {
    pub fn alive_at(&self, t: f64) -> bool {
        self.front.t0 < t && t <= self.t_end
    }

    pub fn left_state(&self) -> State {
        DVector::from_column_slice(&self.left)
    }

    pub fn right_state(&self) -> State {
        DVector::from_column_slice(&self.right)
    }
}

/// Compact description of a front taking part in an event.
#[derive(Debug, Clone, Serialize)]
pub struct WaveRecord {
    pub id: usize,
    pub family: usize,
    pub kind: FrontKind,
    pub sigma: f64,
    pub generation: u32,
    pub lineage: usize,
}

impl From<&Front> for WaveRecord {
    fn from(f: &Front) -> Self {
        Self {
            id: f.id,
            family: f.family,
            kind: f.kind,
            sigma: f.sigma,
            generation: f.generation,
            lineage: f.lineage,
        }
    }
}

/// A resolved collision between fronts.
#[derive(Debug, Clone, Serialize)]
pub struct Interaction {
    pub index: usize,
    pub time: f64,
    pub x: f64,
    pub incoming: Vec<WaveRecord>,
    pub outgoing: Vec<WaveRecord>,
    /// Strengths of the full Riemann fan, one per family, before any were dropped.
    pub raw_sigma: Vec<f64>,
    pub v_before: f64,
    pub v_after: f64,
    pub q_before: f64,
    pub q_after: f64,
    /// Total `|σ|` of waves dropped below the deletion threshold.
    pub dropped: f64,
}

impl Interaction {
    pub fn delta_v(&self) -> f64 {
        self.v_after - self.v_before
    }

    pub fn delta_q(&self) -> f64 {
        self.q_after - self.q_before
    }

    /// Whether every incoming front is a shock of `family`.
    pub fn all_incoming_shocks_of(&self, family: usize) -> bool {
        self.incoming.len() >= 2
            && self
                .incoming
                .iter()
                .all(|w| w.family == family && w.kind == FrontKind::Shock)
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "lowercase", tag = "type")]
pub enum BoundaryEventKind {
    Exit { front: WaveRecord, born: f64 },
    Injection { fronts: Vec<WaveRecord>, outer: Vec<f64> },
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryEvent {
    pub time: f64,
    pub side: Side,
    #[serde(flatten)]
    pub kind: BoundaryEventKind,
}

/// Lineages absorbed into `survivor` at an interaction.
#[derive(Debug, Clone, Serialize)]
pub struct LineageMerge {
    pub time: f64,
    pub x: f64,
    pub survivor: usize,
    pub absorbed: Vec<usize>,
}

/// `(t, V, Q, TV)` sample.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FunctionalSample {
    pub t: f64,
    pub v: f64,
    pub q: f64,
    pub tv: f64,
}

/// Glimm-type functionals of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Functionals {
    /// `Σ |σ_α|`.
    pub v: f64,
    /// `Σ` over approaching pairs of `|σ_α σ_β|`.
    pub q: f64,
    /// Euclidean total variation.
    pub tv: f64,
}

/// Running audit of every shock the engine created.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct ShockAudit {
    pub checked: usize,
    pub max_rh_residual: f64,
    pub lax_failures: usize,
    /// Smallest `min(λ_i(u_l) − s, s − λ_i(u_r)) / |σ|` seen.
    pub min_relative_lax_margin: Option<f64>,
}

/// Front-tracking tuning.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrackingOptions {
    /// Rarefaction fans are split into pieces of strength at most `epsilon`.
    pub epsilon: f64,
    pub riemann: RiemannOptions,
    pub max_events: usize,
    /// Collisions closer than this in time are treated as simultaneous.
    pub time_window: f64,
    /// Outgoing waves weaker than this are dropped.
    pub drop_threshold: f64,
    /// Largest wrong-side strength tolerated at a boundary injection.
    pub contract_tolerance: f64,
}

impl TrackingOptions {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            riemann: RiemannOptions::default(),
            max_events: 2_000_000,
            time_window: 1e-12,
            drop_threshold: 1e-12,
            contract_tolerance: 1e-9,
        }
    }
}

/// Next thing that happens to a simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Event {
    /// Fronts `first..=last` (current indices) meet at `(time, x)`.
    Collision { time: f64, x: f64, first: usize, last: usize },
    /// The front at index `index` reaches the boundary.
    Exit { time: f64, side: Side, index: usize },
}

impl Event {
    pub fn time(&self) -> f64 {
        match *self {
            Event::Collision { time, .. } | Event::Exit { time, .. } => time,
        }
    }
}
