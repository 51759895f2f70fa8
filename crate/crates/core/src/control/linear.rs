use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux_models::{FluxModel, LinearFlux, State};
use crate::profile::PiecewiseProfile;

/// Piecewise-constant scalar on the real line: `values[k]` on
/// `[breaks[k-1], breaks[k])`, with `values[0]` left of every break.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarProfile {
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
}

impl ScalarProfile {
    pub fn eval(&self, x: f64) -> f64 {
        self.values[self.breaks.partition_point(|&b| b <= x)]
    }

    fn push(&mut self, at: f64, value: f64) {
        if self.breaks.last().is_some_and(|&b| b >= at) {
            *self.values.last_mut().unwrap() = value;
        } else {
            self.breaks.push(at);
            self.values.push(value);
        }
    }
}

/// Explicit decoupled-transport solution steering `φ` to `ψ` in time `T`.
#[derive(Debug, Clone, Serialize)]
pub struct LinearControl {
    pub a: f64,
    pub b: f64,
    pub horizon: f64,
    pub tau: f64,
    pub speeds: Vec<f64>,
    pub negative_families: usize,
    #[serde(skip)]
    right: DMatrix<f64>,
    #[serde(skip)]
    left: DMatrix<f64>,
    /// `u_i(0, ·)` on the whole line.
    pub characteristic_data: Vec<ScalarProfile>,
}

impl LinearControl {
    /// `u_i(t, x) = u_i(0, x − λ_i t)`.
    pub fn component(&self, i: usize, t: f64, x: f64) -> f64 {
        self.characteristic_data[i].eval(x - self.speeds[i] * t)
    }

    /// `u(t, x) = Σ u_i(t, x) r_i`.
    pub fn value(&self, t: f64, x: f64) -> State {
        let n = self.speeds.len();
        let mut u = State::zeros(n);
        for i in 0..n {
            u += self.right.column(i) * self.component(i, t, x);
        }
        u
    }

    /// Breakpoints of `u(t, ·)` inside `(a, b)`.
    fn breaks_at(&self, t: f64) -> Vec<f64> {
        let mut xs: Vec<f64> = self
            .characteristic_data
            .iter()
            .zip(&self.speeds)
            .flat_map(|(d, &l)| d.breaks.iter().map(move |&z| z + l * t))
            .filter(|&x| x > self.a && x < self.b)
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|p, q| (*p - *q).abs() <= 1e-12 * (1.0 + q.abs()));
        xs
    }

    /// `u(t, ·)` restricted to `[a, b]`.
    pub fn profile_at(&self, t: f64) -> Result<PiecewiseProfile> {
        let breaks = self.breaks_at(t);
        let mut edges = vec![self.a];
        edges.extend(&breaks);
        edges.push(self.b);
        let values = edges.windows(2).map(|w| self.value(t, 0.5 * (w[0] + w[1]))).collect();
        PiecewiseProfile::new(self.a, self.b, breaks, values)
    }

    /// Boundary control `l_i·u(t, side)` as a function of `t ∈ [0, T]`:
    /// families `p+1..n` at `a`, families `1..p` at `b`.
    pub fn boundary_data(&self, i: usize) -> ScalarProfile {
        let lam = self.speeds[i];
        let x = if i < self.negative_families { self.b } else { self.a };
        let data = &self.characteristic_data[i];
        // t ↦ x − λ t visits the data breakpoints z at t = (x − z)/λ
        let mut ts: Vec<f64> = data
            .breaks
            .iter()
            .map(|&z| (x - z) / lam)
            .filter(|&t| t > 0.0 && t < self.horizon)
            .collect();
        ts.sort_by(f64::total_cmp);
        let mut out = ScalarProfile {
            breaks: Vec::new(),
            values: vec![self.component(i, 0.0, x)],
        };
        let mut edges = vec![0.0];
        edges.extend(&ts);
        edges.push(self.horizon);
        for w in edges.windows(2).skip(1) {
            out.push(w[0], self.component(i, 0.5 * (w[0] + w[1]), x));
        }
        out
    }

    pub fn left_eigenvectors(&self) -> &DMatrix<f64> {
        &self.left
    }
}

fn characteristic_profile(
    l: &State,
    phi: &PiecewiseProfile,
    psi: &PiecewiseProfile,
    shift: f64,
) -> ScalarProfile {
    // pieces (lo, hi, value) of φ on [a, b] and of ψ(· + λT) on [a − λT, b − λT]
    let mut pieces: Vec<(f64, f64, f64)> = Vec::new();
    for k in 0..phi.values.len() {
        let (lo, hi) = phi.piece(k);
        pieces.push((lo, hi, l.dot(&phi.value(k))));
    }
    for k in 0..psi.values.len() {
        let (lo, hi) = psi.piece(k);
        pieces.push((lo - shift, hi - shift, l.dot(&psi.value(k))));
    }
    pieces.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut out = ScalarProfile {
        breaks: Vec::new(),
        values: vec![0.0],
    };
    let mut cursor = f64::NEG_INFINITY;
    for (lo, hi, v) in pieces {
        if lo > cursor && cursor.is_finite() {
            out.push(cursor, 0.0);
        }
        out.push(lo.max(cursor), v);
        cursor = hi;
    }
    out.push(cursor, 0.0);
    out
}

/// Exact control of `u_t + A u_x = 0` on `[a, b]` from `φ` at `t = 0` to `ψ` at `t = T`.
pub fn linear_exact_control(
    a_matrix: &DMatrix<f64>,
    phi: &PiecewiseProfile,
    psi: &PiecewiseProfile,
    horizon: f64,
) -> Result<LinearControl> {
    let model = LinearFlux::new(a_matrix.clone())?;
    let es = model.eigen().clone();
    let n = model.dim();
    if phi.a != psi.a || phi.b != psi.b || phi.dim() != n || psi.dim() != n {
        return Err(Error::Precondition("φ and ψ must live on the same interval and dimension".into()));
    }
    if es.values.iter().any(|&l| l == 0.0) {
        return Err(Error::Precondition("the matrix has a zero eigenvalue".into()));
    }
    let (a, b) = (phi.a, phi.b);
    let tau = es.values.iter().map(|l| (b - a) / l.abs()).fold(0.0, f64::max);
    if horizon < tau {
        return Err(Error::Precondition(format!(
            "horizon {horizon} is shorter than the crossing time {tau}"
        )));
    }
    let data = (0..n)
        .map(|i| characteristic_profile(&es.l(i), phi, psi, es.lambda(i) * horizon))
        .collect();
    Ok(LinearControl {
        a,
        b,
        horizon,
        tau,
        speeds: es.values.iter().copied().collect(),
        negative_families: model.negative_families(),
        right: es.right.clone(),
        left: es.left.clone(),
        characteristic_data: data,
    })
}
