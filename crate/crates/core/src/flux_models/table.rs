use nalgebra::{DMatrix, DVector};

use super::{DomainBox, FluxModel, State};
use crate::error::{Error, Result};

/// Quadratic flux given by a coefficient table:
/// `f_k(u) = b_k + Σ_j A_kj u_j + ½ Σ_jl H_kjl u_j u_l`.
///
/// Eigenstructure is computed numerically.
#[derive(Debug, Clone)]
pub struct QuadraticTable {
    offset: DVector<f64>,
    linear: DMatrix<f64>,
    quadratic: Vec<DMatrix<f64>>,
    p: usize,
    domain: DomainBox,
}

impl QuadraticTable {
    /// `quadratic[k]` is the symmetric Hessian of component `k`.
    pub fn new(
        offset: Vec<f64>,
        linear: Vec<Vec<f64>>,
        quadratic: Vec<Vec<Vec<f64>>>,
        negative_families: usize,
        domain: DomainBox,
    ) -> Result<Self> {
        let n = offset.len();
        let square = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|r| r.len() == n);
        if n == 0 || !square(&linear) || quadratic.len() != n || !quadratic.iter().all(square) {
            return Err(Error::Config("custom-table coefficients have inconsistent shapes".into()));
        }
        if domain.dim() != n {
            return Err(Error::Config("custom-table domain dimension mismatch".into()));
        }
        if negative_families > n {
            return Err(Error::Config("negative family count exceeds dimension".into()));
        }
        let to_mat = |m: &Vec<Vec<f64>>| {
            let flat: Vec<f64> = m.iter().flatten().copied().collect();
            DMatrix::from_row_slice(n, n, &flat)
        };
        Ok(Self {
            offset: DVector::from_vec(offset),
            linear: to_mat(&linear),
            quadratic: quadratic
                .iter()
                .map(|h| {
                    let h = to_mat(h);
                    (&h + h.transpose()) * 0.5
                })
                .collect(),
            p: negative_families,
            domain,
        })
    }
}

impl FluxModel for QuadraticTable {
    fn name(&self) -> &str {
        "custom-table"
    }

    fn dim(&self) -> usize {
        self.offset.len()
    }

    fn negative_families(&self) -> usize {
        self.p
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn flux_unchecked(&self, u: &State) -> State {
        let mut f = &self.offset + &self.linear * u;
        for (k, h) in self.quadratic.iter().enumerate() {
            f[k] += 0.5 * u.dot(&(h * u));
        }
        f
    }

    fn jacobian(&self, u: &State) -> DMatrix<f64> {
        let mut j = self.linear.clone();
        for (k, h) in self.quadratic.iter().enumerate() {
            let row = (h * u).transpose();
            let mut jr = j.row_mut(k);
            jr += row;
        }
        j
    }
}
