//! Systems of conservation laws `u_t + f(u)_x = 0` and their eigenstructure.
//!
//! A model supplies the flux, its Jacobian and (when known) a closed-form
//! eigenstructure and a chart of Riemann coordinates. Everything else in the
//! crate works through the [`FluxModel`] trait object, so user-supplied
//! systems only need `flux_unchecked` plus a domain.

mod eigen;
mod gas;
mod hypotheses;
mod linear;
mod table;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

pub use eigen::numeric_eigen_structure;
pub use gas::IsentropicGas;
pub use hypotheses::{verify_hypotheses, Check, GridSpec, HypothesisReport, Violation};
pub use linear::LinearFlux;
pub use table::QuadraticTable;

/// A point of the state space.
pub type State = DVector<f64>;

/// Builds a state from a slice.
pub fn state(components: &[f64]) -> State {
    DVector::from_column_slice(components)
}

/// Axis-aligned box `lo ≤ u ≤ hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl DomainBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "box bounds must have equal length");
        Self { lo, hi }
    }

    pub fn unbounded(n: usize) -> Self {
        Self::new(vec![f64::NEG_INFINITY; n], vec![f64::INFINITY; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, u: &State) -> bool {
        u.len() == self.dim()
            && u.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (lo, hi))| x.is_finite() && *x >= *lo && *x <= *hi)
    }

    /// Uniform tensor grid with `per_axis` points along every axis, endpoints included.
    pub fn grid(&self, per_axis: usize) -> Vec<State> {
        let per_axis = per_axis.max(2);
        let n = self.dim();
        let total = per_axis.pow(n as u32);
        (0..total)
            .map(|mut idx| {
                let mut u = DVector::zeros(n);
                for k in 0..n {
                    let j = idx % per_axis;
                    idx /= per_axis;
                    let s = j as f64 / (per_axis - 1) as f64;
                    u[k] = self.lo[k] + s * (self.hi[k] - self.lo[k]);
                }
                u
            })
            .collect()
    }
}

/// Right/left eigenvectors and eigenvalues of `Df(u)`.
///
/// Columns of `right` are `r_i`, rows of `left` are `l_i`, with `l_i·r_j = δ_ij`.
#[derive(Debug, Clone)]
pub struct EigenStructure {
    pub values: DVector<f64>,
    pub right: DMatrix<f64>,
    pub left: DMatrix<f64>,
}

impl EigenStructure {
    pub fn r(&self, i: usize) -> State {
        self.right.column(i).into_owned()
    }

    pub fn l(&self, i: usize) -> State {
        self.left.row(i).transpose()
    }

    pub fn lambda(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// `max |l_i·r_j − δ_ij|`.
    pub fn biorthonormality_residual(&self) -> f64 {
        let prod = &self.left * &self.right;
        let n = prod.nrows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - target).abs());
            }
        }
        worst
    }
}

/// Riemann coordinates `w = (w_1, …, w_n)` anchored so that the normalization
/// point maps to the origin. Pushing a state along `r_i` changes only `w_i`.
pub trait RiemannChart: Send + Sync {
    fn to_w(&self, u: &State) -> Result<DVector<f64>>;
    #[allow(clippy::wrong_self_convention)]
    fn from_w(&self, w: &DVector<f64>) -> Result<State>;
}

/// A strictly hyperbolic system `u_t + f(u)_x = 0`.
pub trait FluxModel: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    /// Number of families `n`.
    fn dim(&self) -> usize;

    /// Number `p` of families with negative characteristic speed.
    fn negative_families(&self) -> usize;

    /// Evaluation domain Ω.
    fn domain(&self) -> &DomainBox;

    /// Extra admissibility beyond the box (positivity of density, etc).
    fn admits(&self, u: &State) -> bool {
        self.domain().contains(u)
    }

    /// `f(u)` without the domain check.
    fn flux_unchecked(&self, u: &State) -> State;

    /// `Df(u)`; central differences unless overridden.
    fn jacobian(&self, u: &State) -> DMatrix<f64> {
        let scale = 1e-6;
        linalg::fd_jacobian::<_, std::convert::Infallible>(
            |x| Ok(self.flux_unchecked(x)),
            u,
            scale,
        )
        .unwrap_or_else(|e| match e {})
    }

    /// Closed-form eigenstructure, already oriented.
    fn closed_form_eigen(&self, _u: &State) -> Option<EigenStructure> {
        None
    }

    /// Riemann-coordinate chart, when the model has one.
    fn chart(&self) -> Option<&dyn RiemannChart> {
        None
    }

    /// Whether family `i` is linearly degenerate everywhere.
    fn linearly_degenerate(&self, _i: usize) -> bool {
        false
    }

    /// Largest admissible `|σ|` for a single wave curve.
    fn curve_radius(&self) -> f64 {
        0.5
    }

    /// Declared minimal separation between consecutive eigenvalues.
    fn eigenvalue_gap(&self) -> f64 {
        1e-8
    }

    /// Checked flux evaluation.
    fn eval_flux(&self, u: &State) -> Result<State> {
        if !self.admits(u) {
            return Err(Error::domain(u));
        }
        Ok(self.flux_unchecked(u))
    }

    /// Sorted, biorthonormal and oriented eigenstructure at `u`.
    fn eigen_structure(&self, u: &State) -> Result<EigenStructure> {
        if !self.admits(u) {
            return Err(Error::domain(u));
        }
        match self.closed_form_eigen(u) {
            Some(es) => Ok(es),
            None => numeric_eigen_structure(self, u),
        }
    }

    /// Riemann coordinates of `u`.
    fn riemann_coordinates(&self, u: &State) -> Result<DVector<f64>> {
        let chart = self
            .chart()
            .ok_or_else(|| Error::Degenerate(format!("model '{}' has no chart", self.name())))?;
        if !self.admits(u) {
            return Err(Error::domain(u));
        }
        chart.to_w(u)
    }

    /// Inverse of [`FluxModel::riemann_coordinates`].
    fn state_from_coordinates(&self, w: &DVector<f64>) -> Result<State> {
        let chart = self
            .chart()
            .ok_or_else(|| Error::Degenerate(format!("model '{}' has no chart", self.name())))?;
        let u = chart.from_w(w)?;
        if !self.admits(&u) {
            return Err(Error::domain(&u));
        }
        Ok(u)
    }
}

/// Eigenvalue `λ_i(u)`.
pub fn lambda(model: &dyn FluxModel, u: &State, i: usize) -> Result<f64> {
    Ok(model.eigen_structure(u)?.lambda(i))
}

/// `Dλ_i·r_i` at `u` by central differences along `r_i`.
pub fn gnl_factor(model: &dyn FluxModel, u: &State, i: usize, h: f64) -> Result<f64> {
    let r = model.eigen_structure(u)?.r(i);
    let lp = lambda(model, &(u + &r * h), i)?;
    let lm = lambda(model, &(u - &r * h), i)?;
    Ok((lp - lm) / (2.0 * h))
}

/// `Dr_i·r_i` at `u` by central differences along `r_i`.
pub fn eigenvector_derivative(model: &dyn FluxModel, u: &State, i: usize, h: f64) -> Result<State> {
    let r = model.eigen_structure(u)?.r(i);
    let rp = model.eigen_structure(&(u + &r * h))?.r(i);
    let rm = model.eigen_structure(&(u - &r * h))?.r(i);
    Ok((rp - rm) / (2.0 * h))
}

/// Euclidean distance between two states.
pub fn distance(u: &State, v: &State) -> f64 {
    (u - v).norm()
}

#[cfg(test)]
mod tests;
