//! Piecewise-constant profiles on a bounded interval.

use std::fmt::Write as _;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux_models::State;

/// `u(x) = values[k]` on `[breaks[k-1], breaks[k])`, right-continuous, on `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseProfile {
    pub a: f64,
    pub b: f64,
    pub breaks: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl PiecewiseProfile {
    pub fn new(a: f64, b: f64, breaks: Vec<f64>, values: Vec<State>) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Precondition(format!("invalid interval [{a}, {b}]")));
        }
        if values.len() != breaks.len() + 1 {
            return Err(Error::Precondition(
                "a profile needs one more value than breakpoints".into(),
            ));
        }
        let mut prev = a;
        for &x in &breaks {
            if !(x > prev && x < b) {
                return Err(Error::Precondition(format!(
                    "breakpoints must increase strictly inside ({a}, {b})"
                )));
            }
            prev = x;
        }
        let dim = values[0].len();
        if values.iter().any(|v| v.len() != dim || v.iter().any(|c| !c.is_finite())) {
            return Err(Error::Precondition("profile values must be finite and of equal length".into()));
        }
        Ok(Self {
            a,
            b,
            breaks,
            values: values.iter().map(|v| v.iter().copied().collect()).collect(),
        })
    }

    pub fn constant(a: f64, b: f64, u: &State) -> Result<Self> {
        Self::new(a, b, Vec::new(), vec![u.clone()])
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn value(&self, k: usize) -> State {
        DVector::from_column_slice(&self.values[k])
    }

    /// Right-continuous evaluation.
    pub fn value_at(&self, x: f64) -> State {
        let k = self.breaks.partition_point(|&b| b <= x);
        self.value(k)
    }

    /// Piece `k` as `(x_left, x_right)`.
    pub fn piece(&self, k: usize) -> (f64, f64) {
        let lo = if k == 0 { self.a } else { self.breaks[k - 1] };
        let hi = if k == self.breaks.len() { self.b } else { self.breaks[k] };
        (lo, hi)
    }

    /// Sum of Euclidean jump sizes.
    pub fn total_variation(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[0].iter().zip(&w[1]).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt())
            .sum()
    }

    /// `sup_x |u(x) − u*|` (Euclidean).
    pub fn sup_distance(&self, u_star: &State) -> f64 {
        (0..self.values.len())
            .map(|k| (self.value(k) - u_star).norm())
            .fold(0.0, f64::max)
    }

    /// `∫_a^b u dx`.
    pub fn integral(&self) -> State {
        let mut acc = DVector::zeros(self.dim());
        for k in 0..self.values.len() {
            let (lo, hi) = self.piece(k);
            acc += self.value(k) * (hi - lo);
        }
        acc
    }

    /// Length-weighted mean value.
    pub fn mean(&self) -> State {
        self.integral() / (self.b - self.a)
    }

    /// CSV with columns `x_left, x_right, u1..un`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x_left,x_right");
        for k in 1..=self.dim() {
            let _ = write!(out, ",u{k}");
        }
        out.push('\n');
        for k in 0..self.values.len() {
            let (lo, hi) = self.piece(k);
            let _ = write!(out, "{lo:.16e},{hi:.16e}");
            for x in &self.values[k] {
                let _ = write!(out, ",{x:.16e}");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux_models::state;

    #[test]
    fn evaluation_is_right_continuous() {
        let p = PiecewiseProfile::new(0.0, 1.0, vec![0.5], vec![state(&[1.0]), state(&[2.0])]).unwrap();
        assert_eq!(p.value_at(0.25)[0], 1.0);
        assert_eq!(p.value_at(0.5)[0], 2.0);
        assert_eq!(p.total_variation(), 1.0);
        assert_eq!(p.integral()[0], 1.5);
    }

    #[test]
    fn unordered_breaks_are_rejected() {
        let v = vec![state(&[0.0]); 3];
        assert!(PiecewiseProfile::new(0.0, 1.0, vec![0.6, 0.4], v.clone()).is_err());
        assert!(PiecewiseProfile::new(0.0, 1.0, vec![0.0, 0.4], v).is_err());
    }
}
