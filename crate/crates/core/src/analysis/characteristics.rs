use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux_models::{lambda, State};
use crate::fronttrack::{Side, Simulation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathExit {
    pub t: f64,
    pub x: f64,
    pub side: Side,
}

/// Polyline `(t, x)` traced backward; times are decreasing.
#[derive(Debug, Clone, Serialize)]
pub struct CharacteristicPath {
    pub family: usize,
    pub points: Vec<(f64, f64)>,
    /// Set when the path reaches the boundary before `t = 0`.
    pub exit: Option<PathExit>,
}

impl CharacteristicPath {
    /// Earliest time the path is defined at.
    pub fn earliest(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.0)
    }

    /// Position at time `s`, interpolated on the polyline.
    pub fn position_at(&self, s: f64) -> Option<f64> {
        let pts = &self.points;
        for w in pts.windows(2) {
            let ((t1, x1), (t0, x0)) = (w[0], w[1]);
            if s <= t1 && s >= t0 {
                if t1 == t0 {
                    return Some(x0);
                }
                return Some(x0 + (x1 - x0) * (s - t0) / (t1 - t0));
            }
        }
        match pts.first() {
            Some(&(t, x)) if t == s => Some(x),
            _ => None,
        }
    }

    /// Number of slope changes along the path.
    pub fn kinks(&self) -> usize {
        let slopes: Vec<f64> = self
            .points
            .windows(2)
            .filter(|w| w[0].0 > w[1].0)
            .map(|w| (w[0].1 - w[1].1) / (w[0].0 - w[1].0))
            .collect();
        slopes
            .windows(2)
            .filter(|s| (s[0] - s[1]).abs() > 1e-12 * (1.0 + s[0].abs()))
            .count()
    }
}

enum Mode {
    Gap,
    OnFront(usize),
}

/// Traces the `family` characteristic `ẋ = λ_i(u(t, x))` backward from
/// `(t, x)` to time zero through the front-tracking profile.
///
/// Crossing a front moves the path into the neighbouring gap. When neither
/// side's speed points away from a front (a rarefaction piece seen from
/// inside the fan) the path runs along the front. At a Lax shock of the same
/// family the minimal (left) characteristic is taken.
pub fn backward_characteristic(sim: &Simulation, family: usize, t: f64, x: f64) -> Result<CharacteristicPath> {
    let model = sim.model().clone();
    let (a, b) = sim.interval();
    if family >= model.dim() {
        return Err(Error::Precondition(format!("family {} out of range", family + 1)));
    }
    if !(t >= 0.0 && t <= sim.time() && x >= a && x <= b) {
        return Err(Error::Precondition(format!("start point ({t}, {x}) outside the computed region")));
    }
    let archive = sim.archive();
    let key = |s: f64| s.to_bits();
    let mut births: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut deaths: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut times = vec![0.0];
    for g in archive {
        births.entry(key(g.front.t0)).or_default().push(g.front.id);
        times.push(g.front.t0);
        if g.t_end.is_finite() {
            deaths.entry(key(g.t_end)).or_default().push(g.front.id);
            times.push(g.t_end);
        }
    }
    times.sort_by(f64::total_cmp);
    times.dedup();
    let lower_of = |tau: f64| {
        let k = times.partition_point(|&s| s < tau);
        if k == 0 { 0.0 } else { times[k - 1] }
    };

    let mut tau = t;
    let mut x = x;
    let mut lower = lower_of(tau);
    let mut active: BTreeSet<usize> = archive
        .iter()
        .filter(|g| g.front.t0 <= lower && g.t_end >= tau)
        .map(|g| g.front.id)
        .collect();
    let lam = |u: &State| lambda(model.as_ref(), u, family);
    let mut path = CharacteristicPath {
        family,
        points: vec![(tau, x)],
        exit: None,
    };
    let mut mode = Mode::Gap;
    let scale = 1e-12 * (1.0 + (b - a).abs());

    for _ in 0..10_000_000 {
        if tau <= 0.0 {
            break;
        }
        if let Mode::Gap = mode {
            // a front sitting exactly at x decides the side (or captures the path)
            if let Some(&id) = active
                .iter()
                .find(|&&id| (archive[id].front.position(tau) - x).abs() <= scale)
            {
                let g = &archive[id];
                let v = g.front.speed;
                let left_ok = lam(&g.left_state())? > v;
                let right_ok = lam(&g.right_state())? < v;
                if !left_ok && !right_ok {
                    mode = Mode::OnFront(id);
                }
            }
        }
        let hit_side = match mode {
            Mode::OnFront(id) => {
                let g = &archive[id];
                let stop = g.front.t0.max(lower);
                x = g.front.position(stop);
                tau = stop;
                path.points.push((tau, x));
                if stop == g.front.t0 || !active.contains(&id) {
                    mode = Mode::Gap;
                }
                None
            }
            Mode::Gap => {
                // fronts meeting at one point are ordered by where they were
                // just before, i.e. by decreasing speed
                let before = |p: f64, v: f64, q: (f64, usize)| {
                    let w = archive[q.1].front.speed;
                    p < q.0 || (p == q.0 && v > w)
                };
                let mut left: Option<(f64, usize)> = None;
                let mut right: Option<(f64, usize)> = None;
                for &id in &active {
                    let g = &archive[id];
                    let (p, v) = (g.front.position(tau), g.front.speed);
                    let on = (p - x).abs() <= scale;
                    let goes_left = on && lam(&g.left_state())? > v;
                    if p < x - scale || (on && !goes_left) {
                        if left.is_none_or(|q| !before(p, v, q)) {
                            left = Some((p, id));
                        }
                    } else if right.is_none_or(|q| before(p, v, q)) {
                        right = Some((p, id));
                    }
                }
                let u = match (left, right) {
                    (Some((_, id)), _) => archive[id].right_state(),
                    (None, Some((_, id))) => archive[id].left_state(),
                    (None, None) => super::trace_at(sim, Side::A, 0.5 * (lower + tau)),
                };
                let l = lam(&u)?;
                let mut dt = tau - lower;
                let mut hit: Option<Side> = None;
                if let Some((p, id)) = left {
                    let v = archive[id].front.speed;
                    if l > v {
                        dt = dt.min(((x - p) / (l - v)).max(0.0));
                    }
                }
                if let Some((p, id)) = right {
                    let v = archive[id].front.speed;
                    if l < v {
                        dt = dt.min(((p - x) / (v - l)).max(0.0));
                    }
                }
                if l > 0.0 && (x - a) / l < dt {
                    dt = (x - a) / l;
                    hit = Some(Side::A);
                } else if l < 0.0 && (b - x) / (-l) < dt {
                    dt = (b - x) / (-l);
                    hit = Some(Side::B);
                }
                tau -= dt;
                x -= l * dt;
                if let Some(side) = hit {
                    x = match side {
                        Side::A => a,
                        Side::B => b,
                    };
                }
                path.points.push((tau, x));
                hit
            }
        };
        if let Some(side) = hit_side {
            path.exit = Some(PathExit { t: tau, x, side });
            break;
        }
        if tau <= lower && lower > 0.0 {
            // step into the previous interval: drop fronts born at `lower`,
            // restore those that ended there
            if let Some(ids) = deaths.get(&key(lower)) {
                active.extend(ids.iter().copied());
            }
            if let Some(ids) = births.get(&key(lower)) {
                for id in ids {
                    active.remove(id);
                }
            }
            if let Mode::OnFront(id) = mode {
                if !active.contains(&id) {
                    mode = Mode::Gap;
                }
            }
            tau = lower;
            lower = lower_of(tau);
        }
    }
    path.points.dedup_by(|p, q| p.0 == q.0 && p.1 == q.1);
    Ok(path)
}

/// Spread of two same-family characteristics through `x < y` at time `t`.
#[derive(Debug, Clone, Serialize)]
pub struct SpreadReport {
    pub family: usize,
    pub t: f64,
    /// `(s, (y(t) − x(t)) / (y(s) − x(s)))`.
    pub samples: Vec<(f64, f64)>,
    pub max_ratio: f64,
    /// Earliest time both paths are defined at.
    pub defined_from: f64,
}

pub fn characteristic_spread(sim: &Simulation, family: usize, t: f64, x: f64, y: f64) -> Result<SpreadReport> {
    if !(x < y) {
        return Err(Error::Precondition(format!("need x < y, got {x} and {y}")));
    }
    let px = backward_characteristic(sim, family, t, x)?;
    let py = backward_characteristic(sim, family, t, y)?;
    let from = px.earliest().max(py.earliest());
    let mut ts: Vec<f64> = px
        .points
        .iter()
        .chain(&py.points)
        .map(|p| p.0)
        .filter(|&s| s >= from && s <= t)
        .collect();
    ts.sort_by(|p, q| q.total_cmp(p));
    ts.dedup();
    let width = y - x;
    let mut samples = Vec::with_capacity(ts.len());
    for s in ts {
        if let (Some(xs), Some(ys)) = (px.position_at(s), py.position_at(s)) {
            let gap = ys - xs;
            if gap > 0.0 {
                samples.push((s, width / gap));
            } else {
                return Err(Error::Invariant(format!(
                    "family-{} characteristics cross at s = {s}",
                    family + 1
                )));
            }
        }
    }
    let max_ratio = samples.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(SpreadReport {
        family,
        t,
        samples,
        max_ratio,
        defined_from: from,
    })
}
