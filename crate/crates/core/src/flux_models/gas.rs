use nalgebra::{DMatrix, DVector};

use super::{DomainBox, EigenStructure, FluxModel, RiemannChart, State};
use crate::error::{Error, Result};

/// Isentropic gas in density/velocity variables:
///
/// ```text
/// ρ_t + (ρ v)_x = 0
/// v_t + (v²/2 + K² ρ^{γ−1}/(γ−1))_x = 0
/// ```
///
/// Characteristic speeds are `v ∓ c` with sound speed `c = K ρ^{(γ−1)/2}`.
/// Riemann coordinates are `w_{1,2} = v ∓ 2c/(γ−1)`, shifted so that the
/// normalization point sits at the origin. Eigenvectors are the coordinate
/// tangents `r_i = ∂u/∂w_i`, which gives `Dλ_i·r_i = 1/2 + (γ−1)/4 > 0`.
#[derive(Debug, Clone)]
pub struct IsentropicGas {
    k: f64,
    gamma: f64,
    domain: DomainBox,
    anchor: [f64; 2],
    w_anchor: [f64; 2],
}

impl IsentropicGas {
    /// Gas model with the default domain `ρ ∈ [1e-3, 1e3]`, `|v| ≤ 1e3` and
    /// normalization point `(1, 0)`.
    pub fn new(k: f64, gamma: f64) -> Result<Self> {
        Self::with_domain(
            k,
            gamma,
            DomainBox::new(vec![1e-3, -1e3], vec![1e3, 1e3]),
            DVector::from_vec(vec![1.0, 0.0]),
        )
    }

    pub fn with_domain(k: f64, gamma: f64, domain: DomainBox, anchor: State) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Config(format!("gas constant K must be positive, got {k}")));
        }
        if !(gamma > 1.0 && gamma < 3.0) {
            return Err(Error::Config(format!(
                "adiabatic exponent must satisfy 1 < gamma < 3, got {gamma}"
            )));
        }
        if domain.dim() != 2 || anchor.len() != 2 {
            return Err(Error::Config("gas model is two-dimensional".into()));
        }
        let mut gas = Self {
            k,
            gamma,
            domain,
            anchor: [anchor[0], anchor[1]],
            w_anchor: [0.0, 0.0],
        };
        if !gas.admits(&anchor) {
            return Err(Error::Config(format!(
                "normalization point {:?} is outside the domain",
                gas.anchor
            )));
        }
        gas.w_anchor = gas.raw_w(anchor[0], anchor[1]);
        Ok(gas)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn anchor(&self) -> State {
        DVector::from_vec(self.anchor.to_vec())
    }

    pub fn sound_speed(&self, rho: f64) -> f64 {
        self.k * rho.powf(0.5 * (self.gamma - 1.0))
    }

    fn raw_w(&self, rho: f64, v: f64) -> [f64; 2] {
        let s = 2.0 * self.sound_speed(rho) / (self.gamma - 1.0);
        [v - s, v + s]
    }
}

impl FluxModel for IsentropicGas {
    fn name(&self) -> &str {
        "gas"
    }

    fn dim(&self) -> usize {
        2
    }

    fn negative_families(&self) -> usize {
        1
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn admits(&self, u: &State) -> bool {
        u.len() == 2 && u[0] > 0.0 && self.domain.contains(u)
    }

    fn flux_unchecked(&self, u: &State) -> State {
        let (rho, v) = (u[0], u[1]);
        let g1 = self.gamma - 1.0;
        DVector::from_vec(vec![
            rho * v,
            0.5 * v * v + self.k * self.k * rho.powf(g1) / g1,
        ])
    }

    fn jacobian(&self, u: &State) -> DMatrix<f64> {
        let (rho, v) = (u[0], u[1]);
        let p = self.k * self.k * rho.powf(self.gamma - 2.0);
        DMatrix::from_row_slice(2, 2, &[v, rho, p, v])
    }

    fn closed_form_eigen(&self, u: &State) -> Option<EigenStructure> {
        let (rho, v) = (u[0], u[1]);
        let c = self.sound_speed(rho);
        let values = DVector::from_vec(vec![v - c, v + c]);
        let a = rho / (2.0 * c);
        let right = DMatrix::from_row_slice(2, 2, &[-a, a, 0.5, 0.5]);
        let b = c / rho;
        let left = DMatrix::from_row_slice(2, 2, &[-b, 1.0, b, 1.0]);
        Some(EigenStructure { values, right, left })
    }

    fn chart(&self) -> Option<&dyn RiemannChart> {
        Some(self)
    }

    fn curve_radius(&self) -> f64 {
        0.5
    }

    fn eigenvalue_gap(&self) -> f64 {
        2.0 * self.sound_speed(self.domain.lo[0].max(1e-12))
    }
}

impl RiemannChart for IsentropicGas {
    fn to_w(&self, u: &State) -> Result<DVector<f64>> {
        if u.len() != 2 || !(u[0] > 0.0) || !u[1].is_finite() {
            return Err(Error::ChartDomain {
                state: u.iter().copied().collect(),
            });
        }
        let w = self.raw_w(u[0], u[1]);
        Ok(DVector::from_vec(vec![
            w[0] - self.w_anchor[0],
            w[1] - self.w_anchor[1],
        ]))
    }

    fn from_w(&self, w: &DVector<f64>) -> Result<State> {
        let w1 = w[0] + self.w_anchor[0];
        let w2 = w[1] + self.w_anchor[1];
        let v = 0.5 * (w1 + w2);
        let c = 0.25 * (self.gamma - 1.0) * (w2 - w1);
        if !(c > 0.0) || !v.is_finite() {
            return Err(Error::ChartDomain {
                state: w.iter().copied().collect(),
            });
        }
        let rho = (c / self.k).powf(2.0 / (self.gamma - 1.0));
        Ok(DVector::from_vec(vec![rho, v]))
    }
}
