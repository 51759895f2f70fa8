use nalgebra::{DMatrix, DVector};

use super::{eigen, DomainBox, EigenStructure, FluxModel, RiemannChart, State};
use crate::error::{Error, Result};

/// Constant-coefficient system `u_t + A u_x = 0`.
///
/// Every field is linearly degenerate; the Riemann coordinates are
/// `w = L (u − u*)` with `L` the matrix of left eigenvectors.
#[derive(Debug, Clone)]
pub struct LinearFlux {
    a: DMatrix<f64>,
    eigen: EigenStructure,
    p: usize,
    domain: DomainBox,
    anchor: State,
}

impl LinearFlux {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        let anchor = DVector::zeros(n);
        Self::with_domain(a, DomainBox::unbounded(n), anchor)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Config("linear model needs a square matrix".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(n, n, &flat))
    }

    pub fn with_domain(a: DMatrix<f64>, domain: DomainBox, anchor: State) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || domain.dim() != n || anchor.len() != n {
            return Err(Error::Config("linear model dimensions disagree".into()));
        }
        let probe = Probe { a: a.clone(), domain: domain.clone() };
        let eigen = eigen::numeric_eigen_structure(&probe, &anchor)?;
        let p = eigen.values.iter().filter(|l| **l < 0.0).count();
        Ok(Self { a, eigen, p, domain, anchor })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn eigen(&self) -> &EigenStructure {
        &self.eigen
    }
}

/// Bare matrix wrapper used only to run the numeric eigensolver once.
#[derive(Debug)]
struct Probe {
    a: DMatrix<f64>,
    domain: DomainBox,
}

impl FluxModel for Probe {
    fn name(&self) -> &str {
        "linear-probe"
    }
    fn dim(&self) -> usize {
        self.a.nrows()
    }
    fn negative_families(&self) -> usize {
        0
    }
    fn domain(&self) -> &DomainBox {
        &self.domain
    }
    fn flux_unchecked(&self, u: &State) -> State {
        &self.a * u
    }
    fn jacobian(&self, _u: &State) -> DMatrix<f64> {
        self.a.clone()
    }
    fn linearly_degenerate(&self, _i: usize) -> bool {
        true
    }
}

impl FluxModel for LinearFlux {
    fn name(&self) -> &str {
        "linear"
    }

    fn dim(&self) -> usize {
        self.a.nrows()
    }

    fn negative_families(&self) -> usize {
        self.p
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn flux_unchecked(&self, u: &State) -> State {
        &self.a * u
    }

    fn jacobian(&self, _u: &State) -> DMatrix<f64> {
        self.a.clone()
    }

    fn closed_form_eigen(&self, _u: &State) -> Option<EigenStructure> {
        Some(self.eigen.clone())
    }

    fn chart(&self) -> Option<&dyn RiemannChart> {
        Some(self)
    }

    fn linearly_degenerate(&self, _i: usize) -> bool {
        true
    }

    fn curve_radius(&self) -> f64 {
        f64::INFINITY
    }
}

impl RiemannChart for LinearFlux {
    fn to_w(&self, u: &State) -> Result<DVector<f64>> {
        Ok(&self.eigen.left * (u - &self.anchor))
    }

    fn from_w(&self, w: &DVector<f64>) -> Result<State> {
        Ok(&self.anchor + &self.eigen.right * w)
    }
}
