//! Event-driven front tracking on a bounded interval with absorbing boundaries.
//!
//! The profile is stored as an ordered list of fronts together with the
//! constant states in the gaps between them (`states.len() == fronts.len() + 1`).
//! Every collision is resolved with the accurate Riemann solver; new rarefaction
//! families are split into pieces of strength at most `ε`.

mod functionals;
mod snapshot;
mod types;

use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::flux_models::{lambda, FluxModel, State};
use crate::profile::PiecewiseProfile;
use crate::riemann::{solve_riemann_with, RiemannSolution};
use crate::wave_curves::{rarefaction_curve, WaveKind};

pub use functionals::{
    approaching, calibrate_interaction_constant, glimm_functionals, interaction_potential, wave_measures,
    CalibrationReport, WaveMeasure,
};
pub use snapshot::Snapshot;
pub use types::*;

/// Per-family bookkeeping for the waves leaving an event.
#[derive(Debug, Clone, Copy)]
struct FamilyMeta {
    generation: u32,
    lineage: Option<usize>,
    split: bool,
}

/// An `ε`-approximate front-tracking solution under construction.
#[derive(Debug, Clone)]
pub struct Simulation {
    model: Arc<dyn FluxModel>,
    a: f64,
    b: f64,
    opts: TrackingOptions,
    time: f64,
    fronts: Vec<Front>,
    states: Vec<State>,
    archive: Vec<Segment>,
    interactions: Vec<Interaction>,
    boundary_events: Vec<BoundaryEvent>,
    merges: Vec<LineageMerge>,
    history: Vec<FunctionalSample>,
    left_timeline: Vec<(f64, State)>,
    right_timeline: Vec<(f64, State)>,
    flux_a: State,
    flux_b: State,
    q: f64,
    dropped: f64,
    events: usize,
    audit: ShockAudit,
}

impl Simulation {
    /// Resolves every jump of `data` and splits the rarefactions.
    pub fn new(model: Arc<dyn FluxModel>, data: &PiecewiseProfile, opts: TrackingOptions) -> Result<Self> {
        if !(opts.epsilon > 0.0 && opts.epsilon.is_finite()) {
            return Err(Error::Precondition(format!("front accuracy must be positive, got {}", opts.epsilon)));
        }
        if data.dim() != model.dim() {
            return Err(Error::Precondition("profile dimension does not match the model".into()));
        }
        let n = model.dim();
        let first = data.value(0);
        let mut sim = Self {
            a: data.a,
            b: data.b,
            opts,
            time: 0.0,
            fronts: Vec::new(),
            states: vec![first.clone()],
            archive: Vec::new(),
            interactions: Vec::new(),
            boundary_events: Vec::new(),
            merges: Vec::new(),
            history: Vec::new(),
            left_timeline: vec![(0.0, first.clone())],
            right_timeline: Vec::new(),
            flux_a: DVector::zeros(n),
            flux_b: DVector::zeros(n),
            q: 0.0,
            dropped: 0.0,
            events: 0,
            audit: ShockAudit::default(),
            model,
        };
        for k in 0..data.values.len() {
            let u = data.value(k);
            if !sim.model.admits(&u) {
                return Err(Error::domain(&u));
            }
        }
        for (k, &x) in data.breaks.iter().enumerate() {
            let ul = data.value(k);
            let ur = data.value(k + 1);
            let sol = solve_riemann_with(sim.model.as_ref(), &ul, &ur, &sim.opts.riemann)?;
            let meta = |_: usize| FamilyMeta {
                generation: 1,
                lineage: None,
                split: true,
            };
            let (fronts, interior, dropped) =
                sim.build_fan(&sol, |_| true, &ul, &ur, x, 0.0, Origin::Initial, meta)?;
            sim.dropped += dropped;
            // a jump made only of null waves is below resolution and is skipped
            if !fronts.is_empty() {
                sim.fronts.extend(fronts);
                sim.states.extend(interior);
                sim.states.push(ur);
            }
        }
        sim.right_timeline.push((0.0, sim.states.last().unwrap().clone()));
        sim.q = interaction_potential(&sim.fronts);
        sim.record_history();
        Ok(sim)
    }

    pub fn model(&self) -> &Arc<dyn FluxModel> {
        &self.model
    }

    pub fn options(&self) -> &TrackingOptions {
        &self.opts
    }

    /// Changes the rarefaction splitting accuracy for waves created from now on.
    pub fn set_epsilon(&mut self, epsilon: f64) {
        self.opts.epsilon = epsilon;
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn fronts(&self) -> &[Front] {
        &self.fronts
    }

    /// Gap states, `fronts().len() + 1` of them.
    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn front_count(&self) -> usize {
        self.fronts.len()
    }

    /// Profile value next to the boundary (`u(t, a+)` or `u(t, b−)`).
    pub fn trace(&self, side: Side) -> &State {
        match side {
            Side::A => &self.states[0],
            Side::B => self.states.last().unwrap(),
        }
    }

    pub fn interactions(&self) -> &[Interaction] {
        &self.interactions
    }

    pub fn boundary_events(&self) -> &[BoundaryEvent] {
        &self.boundary_events
    }

    /// Every front ever created, indexed by id.
    pub fn archive(&self) -> &[Segment] {
        &self.archive
    }

    pub fn merges(&self) -> &[LineageMerge] {
        &self.merges
    }

    pub fn history(&self) -> &[FunctionalSample] {
        &self.history
    }

    /// Times at which the trace at `side` changed, with the new value.
    pub fn trace_timeline(&self, side: Side) -> &[(f64, State)] {
        match side {
            Side::A => &self.left_timeline,
            Side::B => &self.right_timeline,
        }
    }

    /// `∫_0^t f(u(s, side)) ds`.
    pub fn boundary_flux_integral(&self, side: Side) -> &State {
        match side {
            Side::A => &self.flux_a,
            Side::B => &self.flux_b,
        }
    }

    pub fn shock_audit(&self) -> &ShockAudit {
        &self.audit
    }

    /// Total strength of all waves dropped below the deletion threshold.
    pub fn dropped_mass(&self) -> f64 {
        self.dropped
    }

    pub fn event_count(&self) -> usize {
        self.events
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot::new(self.time, self.a, self.b, self.fronts.clone(), self.states.clone())
    }

    /// `(V, Q, TV)` recomputed from scratch.
    pub fn glimm_functionals(&self) -> Functionals {
        glimm_functionals(&self.fronts, &self.states)
    }

    fn current_v(&self) -> f64 {
        self.fronts.iter().map(|f| f.sigma.abs()).sum()
    }

    fn current_tv(&self) -> f64 {
        self.states.windows(2).map(|w| (&w[1] - &w[0]).norm()).sum()
    }

    fn record_history(&mut self) {
        self.history.push(FunctionalSample {
            t: self.time,
            v: self.current_v(),
            q: self.q,
            tv: self.current_tv(),
        });
    }

    /// Earliest collision among adjacent fronts or exit of an end front.
    /// Simultaneous collisions sharing fronts are merged into one event.
    pub fn next_event(&self) -> Option<Event> {
        let t = self.time;
        let n = self.fronts.len();
        if n == 0 {
            return None;
        }
        let pos: Vec<f64> = self.fronts.iter().map(|f| f.position(t)).collect();
        let pair_time: Vec<Option<f64>> = (0..n.saturating_sub(1))
            .map(|k| {
                let (l, r) = (&self.fronts[k], &self.fronts[k + 1]);
                let closing = l.speed - r.speed;
                (closing > 0.0).then(|| t + ((pos[k + 1] - pos[k]) / closing).max(0.0))
            })
            .collect();
        let exit_a = (self.fronts[0].speed < 0.0).then(|| t + ((self.a - pos[0]) / self.fronts[0].speed).max(0.0));
        let exit_b =
            (self.fronts[n - 1].speed > 0.0).then(|| t + ((self.b - pos[n - 1]) / self.fronts[n - 1].speed).max(0.0));

        let t_min = pair_time
            .iter()
            .flatten()
            .chain(exit_a.iter())
            .chain(exit_b.iter())
            .copied()
            .fold(f64::INFINITY, f64::min);
        if !t_min.is_finite() {
            return None;
        }
        let within = |s: Option<f64>| s.is_some_and(|s| s <= t_min + self.opts.time_window);
        if within(exit_a) {
            return Some(Event::Exit {
                time: exit_a.unwrap(),
                side: Side::A,
                index: 0,
            });
        }
        if let Some(k) = (0..pair_time.len()).find(|&k| within(pair_time[k])) {
            let mut last = k + 1;
            while last < pair_time.len() && within(pair_time[last]) {
                last += 1;
            }
            let time = pair_time[k].unwrap();
            let x = (k..=last).map(|j| self.fronts[j].position(time)).sum::<f64>() / (last - k + 1) as f64;
            return Some(Event::Collision {
                time,
                x: x.clamp(self.a, self.b),
                first: k,
                last,
            });
        }
        Some(Event::Exit {
            time: exit_b.unwrap(),
            side: Side::B,
            index: n - 1,
        })
    }

    fn advance_clock(&mut self, t: f64) {
        let t = t.max(self.time);
        let dt = t - self.time;
        if dt > 0.0 {
            self.flux_a += self.model.flux_unchecked(&self.states[0]) * dt;
            self.flux_b += self.model.flux_unchecked(self.states.last().unwrap()) * dt;
        }
        self.time = t;
    }

    fn bump_events(&mut self) -> Result<()> {
        self.events += 1;
        if self.events > self.opts.max_events {
            return Err(Error::EventBudget(self.opts.max_events));
        }
        Ok(())
    }

    /// Resolves `event`, which must be the current [`Simulation::next_event`].
    pub fn resolve(&mut self, event: Event) -> Result<()> {
        self.bump_events()?;
        match event {
            Event::Collision { time, x, first, last } => self.resolve_collision(time, x, first, last),
            Event::Exit { time, side, index } => {
                self.resolve_exit(time, side, index);
                Ok(())
            }
        }
    }

    /// Resolves the next event, if any.
    pub fn step(&mut self) -> Result<Option<Event>> {
        match self.next_event() {
            Some(ev) => {
                self.resolve(ev)?;
                Ok(Some(ev))
            }
            None => Ok(None),
        }
    }

    /// Resolves all events up to time `t` and moves the clock to `t`.
    pub fn advance_to(&mut self, t: f64) -> Result<Snapshot> {
        if t < self.time {
            return Err(Error::Precondition(format!(
                "cannot advance backwards from {} to {t}",
                self.time
            )));
        }
        while let Some(ev) = self.next_event() {
            if ev.time() > t {
                break;
            }
            self.resolve(ev)?;
        }
        self.advance_clock(t);
        Ok(self.snapshot())
    }

    fn end_front(&mut self, id: usize, t: f64, reason: EndReason) {
        let seg = &mut self.archive[id];
        seg.t_end = t;
        seg.end = Some(reason);
    }

    fn resolve_exit(&mut self, time: f64, side: Side, index: usize) {
        self.advance_clock(time);
        let front = self.fronts.remove(index);
        let loss: f64 = self
            .fronts
            .iter()
            .filter(|f| match side {
                Side::A => approaching(&front, f),
                Side::B => approaching(f, &front),
            })
            .map(|f| (f.sigma * front.sigma).abs())
            .sum();
        self.q -= loss;
        match side {
            Side::A => {
                self.states.remove(0);
                self.left_timeline.push((time, self.states[0].clone()));
            }
            Side::B => {
                self.states.pop();
                self.right_timeline.push((time, self.states.last().unwrap().clone()));
            }
        }
        self.end_front(front.id, time, EndReason::Exit(side));
        self.boundary_events.push(BoundaryEvent {
            time,
            side,
            kind: BoundaryEventKind::Exit {
                front: (&front).into(),
                born: front.t0,
            },
        });
        self.record_history();
    }

    /// `Q` contribution of `group` (occupying indices `first..=last`) against
    /// all other fronts and within itself.
    fn group_potential(&self, group: &[Front], first: usize, last: usize) -> f64 {
        let mut q = 0.0;
        for g in group {
            for o in &self.fronts[..first] {
                if approaching(o, g) {
                    q += (o.sigma * g.sigma).abs();
                }
            }
            for o in &self.fronts[last + 1..] {
                if approaching(g, o) {
                    q += (o.sigma * g.sigma).abs();
                }
            }
        }
        q + interaction_potential(group)
    }

    fn resolve_collision(&mut self, time: f64, x: f64, first: usize, last: usize) -> Result<()> {
        self.advance_clock(time);
        let ul = self.states[first].clone();
        let ur = self.states[last + 1].clone();
        let sol = solve_riemann_with(self.model.as_ref(), &ul, &ur, &self.opts.riemann)?;
        let incoming: Vec<Front> = self.fronts[first..=last].to_vec();
        let index = self.interactions.len();
        let min_gen = incoming.iter().map(|f| f.generation).min().unwrap_or(1);
        let strongest = |i: usize| {
            incoming
                .iter()
                .filter(|f| f.family == i)
                .max_by(|p, q| p.sigma.abs().total_cmp(&q.sigma.abs()))
                .cloned()
        };
        let meta = |i: usize| match strongest(i) {
            Some(f) => FamilyMeta {
                generation: f.generation,
                lineage: Some(f.lineage),
                split: false,
            },
            None => FamilyMeta {
                generation: min_gen + 1,
                lineage: None,
                split: true,
            },
        };
        let (outgoing, interior, dropped) =
            self.build_fan(&sol, |_| true, &ul, &ur, x, time, Origin::Interaction(index), meta)?;

        let v_before = self.current_v();
        let q_before = self.q;
        let q_in = self.group_potential(&incoming, first, last);
        let q_out = self.group_potential(&outgoing, first, last);

        for f in &incoming {
            self.end_front(f.id, time, EndReason::Interaction(index));
        }
        for i in 0..self.model.dim() {
            let same: Vec<&Front> = incoming.iter().filter(|f| f.family == i).collect();
            if same.len() > 1 {
                if let Some(out) = outgoing.iter().find(|f| f.family == i) {
                    let survivor = out.lineage;
                    let mut absorbed: Vec<usize> =
                        same.iter().map(|f| f.lineage).filter(|&l| l != survivor).collect();
                    absorbed.dedup();
                    self.merges.push(LineageMerge {
                        time,
                        x,
                        survivor,
                        absorbed,
                    });
                }
            }
        }

        let touches_b = last + 1 == self.fronts.len();
        self.fronts.splice(first..=last, outgoing.iter().cloned());
        if outgoing.is_empty() {
            // full cancellation: the two outer gaps merge into the left one
            self.states.drain(first + 1..=last + 1);
            if touches_b {
                self.right_timeline.push((time, self.states.last().unwrap().clone()));
            }
        } else {
            self.states.splice(first + 1..=last, interior);
        }
        self.dropped += dropped;
        self.q = q_before - q_in + q_out;
        let v_after = self.current_v();
        self.interactions.push(Interaction {
            index,
            time,
            x,
            incoming: incoming.iter().map(WaveRecord::from).collect(),
            outgoing: outgoing.iter().map(WaveRecord::from).collect(),
            raw_sigma: sol.sigma.clone(),
            v_before,
            v_after,
            q_before,
            q_after: self.q,
            dropped,
        });
        self.record_history();
        Ok(())
    }

    /// Imposes `outer` beyond the boundary at the current time.
    ///
    /// At `b` the Riemann problem `(u(t,b−), outer)` may only emit families
    /// `1..=p` into the domain; at `a`, `(outer, u(t,a+))` may only emit
    /// families `p+1..=n`. Wrong-side waves above the contract tolerance are an
    /// error. Returns the ids of the injected fronts.
    pub fn inject_boundary_riemann(&mut self, side: Side, outer: &State) -> Result<Vec<usize>> {
        let p = self.model.negative_families();
        let trace = self.trace(side).clone();
        let (ul, ur) = match side {
            Side::B => (trace.clone(), outer.clone()),
            Side::A => (outer.clone(), trace.clone()),
        };
        let sol = solve_riemann_with(self.model.as_ref(), &ul, &ur, &self.opts.riemann)?;
        let inward = |i: usize| match side {
            Side::B => i < p,
            Side::A => i >= p,
        };
        let mut wrong = 0.0_f64;
        for w in &sol.waves {
            if !inward(w.family) {
                wrong = wrong.max(w.sigma.abs());
            }
        }
        if wrong > self.opts.contract_tolerance {
            return Err(Error::Contract(format!(
                "injection at {} emits an outgoing wave of strength {wrong:e}",
                side.as_str()
            )));
        }
        // the gap state on the domain side of the injected fan
        let edge = match side {
            Side::B => sol.state(p),
            Side::A => sol.state(p),
        };
        let (lo, hi) = match side {
            Side::B => (trace.clone(), edge.clone()),
            Side::A => (edge.clone(), trace.clone()),
        };
        let meta = |_: usize| FamilyMeta {
            generation: 1,
            lineage: None,
            split: true,
        };
        let x = match side {
            Side::A => self.a,
            Side::B => self.b,
        };
        let (fronts, interior, dropped) =
            self.build_fan(&sol, inward, &lo, &hi, x, self.time, Origin::Boundary(side), meta)?;
        let wrong_mass: f64 = sol.waves.iter().filter(|w| !inward(w.family)).map(|w| w.sigma.abs()).sum();
        self.dropped += dropped + wrong_mass;
        let ids: Vec<usize> = fronts.iter().map(|f| f.id).collect();
        let n_old = self.fronts.len();
        let gained = match side {
            Side::A => self.group_potential_at_edge(&fronts, true),
            Side::B => self.group_potential_at_edge(&fronts, false),
        } + interaction_potential(&fronts);
        match side {
            Side::B => {
                if !fronts.is_empty() {
                    self.fronts.extend(fronts.iter().cloned());
                    self.states.extend(interior);
                    self.states.push(edge);
                } else {
                    *self.states.last_mut().unwrap() = edge;
                }
                self.right_timeline.push((self.time, self.states.last().unwrap().clone()));
            }
            Side::A => {
                let mut new_states = vec![edge];
                new_states.extend(interior);
                if fronts.is_empty() {
                    self.states[0] = new_states.remove(0);
                } else {
                    self.states.splice(0..0, new_states);
                    self.fronts.splice(0..0, fronts.iter().cloned());
                }
                self.left_timeline.push((self.time, self.states[0].clone()));
            }
        }
        debug_assert_eq!(self.fronts.len(), n_old + ids.len());
        self.q += gained;
        self.boundary_events.push(BoundaryEvent {
            time: self.time,
            side,
            kind: BoundaryEventKind::Injection {
                fronts: fronts.iter().map(WaveRecord::from).collect(),
                outer: outer.iter().copied().collect(),
            },
        });
        self.record_history();
        Ok(ids)
    }

    fn group_potential_at_edge(&self, group: &[Front], at_left: bool) -> f64 {
        let mut q = 0.0;
        for g in group {
            for o in &self.fronts {
                let app = if at_left { approaching(g, o) } else { approaching(o, g) };
                if app {
                    q += (g.sigma * o.sigma).abs();
                }
            }
        }
        q
    }

    #[allow(clippy::too_many_arguments)]
    fn new_front(
        &mut self,
        family: usize,
        kind: FrontKind,
        sigma: f64,
        speed: f64,
        x: f64,
        t: f64,
        origin: Origin,
        meta: FamilyMeta,
        left: &State,
        right: &State,
    ) -> Front {
        let id = self.archive.len();
        let front = Front {
            id,
            family,
            kind,
            sigma,
            speed,
            generation: meta.generation,
            lineage: meta.lineage.unwrap_or(id),
            x0: x,
            t0: t,
            origin,
        };
        self.archive.push(Segment {
            front: front.clone(),
            left: left.iter().copied().collect(),
            right: right.iter().copied().collect(),
            t_end: f64::INFINITY,
            end: None,
        });
        front
    }

    fn audit_shock(&mut self, family: usize, sigma: f64, speed: f64, left: &State, right: &State) -> Result<()> {
        let m = self.model.as_ref();
        let rh = (m.flux_unchecked(right) - m.flux_unchecked(left) - (right - left) * speed).amax();
        let margin = (lambda(m, left, family)? - speed).min(speed - lambda(m, right, family)?);
        let a = &mut self.audit;
        a.checked += 1;
        a.max_rh_residual = a.max_rh_residual.max(rh);
        if margin <= 0.0 {
            a.lax_failures += 1;
        }
        let rel = margin / sigma.abs();
        a.min_relative_lax_margin = Some(a.min_relative_lax_margin.map_or(rel, |m| m.min(rel)));
        Ok(())
    }

    /// Turns the kept waves of `sol` into fronts at `(t, x)` spanning `lo → hi`.
    /// Returns the fronts, the interior gap states and the dropped strength.
    #[allow(clippy::too_many_arguments)]
    fn build_fan(
        &mut self,
        sol: &RiemannSolution,
        keep: impl Fn(usize) -> bool,
        lo: &State,
        hi: &State,
        x: f64,
        t: f64,
        origin: Origin,
        meta: impl Fn(usize) -> FamilyMeta,
    ) -> Result<(Vec<Front>, Vec<State>, f64)> {
        let mut dropped = 0.0;
        let kept: Vec<usize> = sol
            .waves
            .iter()
            .enumerate()
            .filter(|(_, w)| keep(w.family))
            .filter_map(|(k, w)| {
                if w.sigma.abs() < self.opts.drop_threshold {
                    dropped += w.sigma.abs();
                    None
                } else {
                    Some(k)
                }
            })
            .collect();
        let mut fronts = Vec::new();
        let mut interior = Vec::new();
        let mut left = lo.clone();
        for (pos, &k) in kept.iter().enumerate() {
            let w = &sol.waves[k];
            let is_last = pos + 1 == kept.len();
            let right = if is_last { hi.clone() } else { sol.state(k + 1) };
            let m = meta(w.family);
            let kind = FrontKind::from_wave(w.kind.unwrap_or(WaveKind::Contact));
            let pieces = if kind == FrontKind::RarefactionPiece && m.split {
                piece_count(w.sigma, self.opts.epsilon)
            } else {
                1
            };
            let base = sol.state(k);
            for j in 0..pieces {
                let piece_right = if j + 1 == pieces {
                    right.clone()
                } else {
                    rarefaction_curve(self.model.as_ref(), &base, w.family, w.sigma * (j + 1) as f64 / pieces as f64)?
                        .state
                };
                let speed = match kind {
                    FrontKind::Shock => w.speed_left,
                    FrontKind::RarefactionPiece | FrontKind::Contact => lambda(self.model.as_ref(), &left, w.family)?,
                };
                let sigma = w.sigma / pieces as f64;
                let piece_meta = if j == 0 { m } else { FamilyMeta { lineage: None, ..m } };
                if kind == FrontKind::Shock {
                    self.audit_shock(w.family, sigma, speed, &left, &piece_right)?;
                }
                let f = self.new_front(w.family, kind, sigma, speed, x, t, origin, piece_meta, &left, &piece_right);
                fronts.push(f);
                if !(is_last && j + 1 == pieces) {
                    interior.push(piece_right.clone());
                }
                left = piece_right;
            }
        }
        Ok((fronts, interior, dropped))
    }
}

/// `ceil(σ/ε)`, forgiving a relative roundoff excess of `1e-9`.
pub fn piece_count(sigma: f64, epsilon: f64) -> usize {
    ((sigma / epsilon) * (1.0 - 1e-9)).ceil().max(1.0) as usize
}
