use serde::Serialize;

use super::{eigenvector_derivative, gnl_factor, DomainBox, FluxModel, State};
use crate::linalg::wedge;

/// Sampling grid for hypothesis checks.
#[derive(Debug, Clone, Serialize)]
pub struct GridSpec {
    pub bounds: DomainBox,
    pub per_axis: usize,
    /// Required lower bound on `|λ_i|`.
    pub speed_floor: f64,
    /// Finite-difference step for `Dλ_i·r_i` and `Dr_i·r_i`.
    pub fd_step: f64,
}

impl GridSpec {
    pub fn new(bounds: DomainBox) -> Self {
        Self {
            bounds,
            per_axis: 32,
            speed_floor: 0.0,
            fd_step: 1e-5,
        }
    }

    pub fn per_axis(mut self, n: usize) -> Self {
        self.per_axis = n;
        self
    }

    pub fn speed_floor(mut self, c0: f64) -> Self {
        self.speed_floor = c0;
        self
    }
}

/// Outcome of one sampled check; `margin > 0` on the passing side.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Check {
    pub evaluated: bool,
    pub passed: bool,
    pub margin: f64,
}

impl Check {
    fn skipped() -> Self {
        Self {
            evaluated: false,
            passed: true,
            margin: f64::NAN,
        }
    }

    fn fresh() -> Self {
        Self {
            evaluated: true,
            passed: true,
            margin: f64::INFINITY,
        }
    }

    fn record(&mut self, margin: f64) -> bool {
        self.margin = self.margin.min(margin);
        let ok = margin > 0.0;
        self.passed &= ok;
        ok
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub check: &'static str,
    pub state: Vec<f64>,
    pub value: f64,
}

/// Per-check pass flags and worst margins over a sampling grid.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub points: usize,
    /// Real, distinct eigenvalues at every grid point.
    pub strict_hyperbolicity: Check,
    /// `λ_i < 0` for `i ≤ p` and `λ_i > 0` for `i > p`.
    pub sign_split: Check,
    /// `|λ_i| ≥ c₀` with no sign change across the grid.
    pub speed_floor: Check,
    /// Observed `(min |λ_i|, max |λ_i|)`.
    pub speed_bounds: (f64, f64),
    /// `Dλ_i·r_i > 0`.
    pub genuine_nonlinearity: Check,
    /// `r_1 ∧ r_2 < 0` (2×2 only).
    pub eigenvector_orientation: Check,
    /// `r_i ∧ (Dr_i·r_i) < 0`, i.e. rarefaction curves turn clockwise (2×2 only).
    pub clockwise_turning: Check,
    pub worst_biorthonormality: f64,
    pub worst_eigen_residual: f64,
    pub violations: Vec<Violation>,
}

impl HypothesisReport {
    /// Speed hypotheses needed by the boundary-control constructions.
    pub fn admits_control(&self) -> bool {
        self.strict_hyperbolicity.passed && self.sign_split.passed && self.speed_floor.passed
    }

    /// Full structural hypotheses for the 2×2 counterexample analysis.
    pub fn admits_counterexample(&self) -> bool {
        self.admits_control()
            && self.genuine_nonlinearity.passed
            && self.eigenvector_orientation.passed
            && self.clockwise_turning.passed
    }
}

/// Samples the grid and reports every hypothesis with its worst margin.
/// Violations are collected, never raised.
pub fn verify_hypotheses(model: &dyn FluxModel, grid: &GridSpec) -> HypothesisReport {
    let n = model.dim();
    let p = model.negative_families();
    let pts = grid.bounds.grid(grid.per_axis);
    let two_by_two = n == 2;
    let mut rep = HypothesisReport {
        points: pts.len(),
        strict_hyperbolicity: Check::fresh(),
        sign_split: Check::fresh(),
        speed_floor: Check::fresh(),
        speed_bounds: (f64::INFINITY, 0.0),
        genuine_nonlinearity: Check::fresh(),
        eigenvector_orientation: if two_by_two { Check::fresh() } else { Check::skipped() },
        clockwise_turning: if two_by_two { Check::fresh() } else { Check::skipped() },
        worst_biorthonormality: 0.0,
        worst_eigen_residual: 0.0,
        violations: Vec::new(),
    };
    let mut lam_min = vec![f64::INFINITY; n];
    let mut lam_max = vec![f64::NEG_INFINITY; n];
    let h = grid.fd_step;

    let flag = |rep: &mut HypothesisReport, check: &'static str, u: &State, value: f64| {
        rep.violations.push(Violation {
            check,
            state: u.iter().copied().collect(),
            value,
        });
    };

    for u in &pts {
        let es = match model.eigen_structure(u) {
            Ok(es) => es,
            Err(_) => {
                rep.strict_hyperbolicity.record(-1.0);
                flag(&mut rep, "strict_hyperbolicity", u, f64::NAN);
                continue;
            }
        };
        let gap = es
            .values
            .as_slice()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        if !rep.strict_hyperbolicity.record(gap) {
            flag(&mut rep, "strict_hyperbolicity", u, gap);
        }
        rep.worst_biorthonormality = rep.worst_biorthonormality.max(es.biorthonormality_residual());
        let a = model.jacobian(u);
        for i in 0..n {
            let r = es.r(i);
            let res = (&a * &r - &r * es.lambda(i)).norm() / r.norm();
            rep.worst_eigen_residual = rep.worst_eigen_residual.max(res);
        }

        for i in 0..n {
            let l = es.lambda(i);
            lam_min[i] = lam_min[i].min(l);
            lam_max[i] = lam_max[i].max(l);
            let signed = if i < p { -l } else { l };
            if !rep.sign_split.record(signed) {
                flag(&mut rep, "sign_split", u, l);
            }
            rep.speed_bounds.0 = rep.speed_bounds.0.min(l.abs());
            rep.speed_bounds.1 = rep.speed_bounds.1.max(l.abs());
            let floor_margin = if grid.speed_floor > 0.0 {
                l.abs() - grid.speed_floor
            } else {
                l.abs()
            };
            if !rep.speed_floor.record(floor_margin) {
                flag(&mut rep, "speed_floor", u, l);
            }
            if !model.linearly_degenerate(i) {
                match gnl_factor(model, u, i, h) {
                    Ok(g) => {
                        if !rep.genuine_nonlinearity.record(g) {
                            flag(&mut rep, "genuine_nonlinearity", u, g);
                        }
                    }
                    Err(_) => {
                        rep.genuine_nonlinearity.record(-1.0);
                        flag(&mut rep, "genuine_nonlinearity", u, f64::NAN);
                    }
                }
            }
        }

        if two_by_two {
            let o = wedge(&es.r(0), &es.r(1));
            if !rep.eigenvector_orientation.record(-o) {
                flag(&mut rep, "eigenvector_orientation", u, o);
            }
            for i in 0..2 {
                match eigenvector_derivative(model, u, i, h) {
                    Ok(d) => {
                        let t = wedge(&es.r(i), &d);
                        if !rep.clockwise_turning.record(-t) {
                            flag(&mut rep, "clockwise_turning", u, t);
                        }
                    }
                    Err(_) => {
                        rep.clockwise_turning.record(-1.0);
                        flag(&mut rep, "clockwise_turning", u, f64::NAN);
                    }
                }
            }
        }
    }

    // a speed that changes sign across the box cannot stay away from zero
    for i in 0..n {
        if lam_min[i] < 0.0 && lam_max[i] > 0.0 {
            rep.speed_floor.passed = false;
            rep.speed_floor.margin = rep.speed_floor.margin.min(0.0);
        }
    }
    if !rep.genuine_nonlinearity.margin.is_finite() {
        // every family linearly degenerate
        rep.genuine_nonlinearity = Check::skipped();
    }
    rep
}
