use nalgebra::{DMatrix, DVector};

use super::{EigenStructure, FluxModel, State};
use crate::error::{Error, Result};

/// Eigenvalues of a real matrix, sorted ascending; errors when complex or repeated.
pub(crate) fn sorted_real_eigenvalues(a: &DMatrix<f64>, gap: f64, at: &State) -> Result<Vec<f64>> {
    let not_hyperbolic = |reason: String| Error::NotHyperbolic {
        state: at.iter().copied().collect(),
        reason,
    };
    let complex = a.clone().complex_eigenvalues();
    let scale = a.norm().max(1.0);
    let mut values = Vec::with_capacity(complex.len());
    for z in complex.iter() {
        if z.im.abs() > 1e-10 * scale {
            return Err(not_hyperbolic(format!("complex eigenvalue {z}")));
        }
        values.push(z.re);
    }
    values.sort_by(f64::total_cmp);
    for w in values.windows(2) {
        if w[1] - w[0] <= gap.max(1e-12 * scale) {
            return Err(not_hyperbolic(format!(
                "eigenvalues {} and {} are not separated",
                w[0], w[1]
            )));
        }
    }
    Ok(values)
}

/// Unit null vector of `a − λI` from the smallest singular value.
fn null_vector(a: &DMatrix<f64>, lambda: f64) -> DVector<f64> {
    let n = a.nrows();
    let shifted = a - DMatrix::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty matrix");
    v_t.row(k).transpose().normalize()
}

fn raw_numeric(model: &(impl FluxModel + ?Sized), u: &State) -> Result<EigenStructure> {
    let a = model.jacobian(u);
    let values = sorted_real_eigenvalues(&a, model.eigenvalue_gap(), u)?;
    let n = values.len();
    let mut right = DMatrix::zeros(n, n);
    for (i, &lam) in values.iter().enumerate() {
        right.set_column(i, &null_vector(&a, lam));
    }
    let left = right.clone().try_inverse().ok_or_else(|| Error::NotHyperbolic {
        state: u.iter().copied().collect(),
        reason: "eigenvectors are linearly dependent".into(),
    })?;
    Ok(EigenStructure {
        values: DVector::from_vec(values),
        right,
        left,
    })
}

/// Eigenstructure from a numeric eigensolve of `Df(u)`.
///
/// Right eigenvectors have unit length. Each `r_i` is oriented so that
/// `Dλ_i·r_i > 0` when the field is genuinely nonlinear at `u`, otherwise so
/// that its first nonzero component is positive.
pub fn numeric_eigen_structure(model: &(impl FluxModel + ?Sized), u: &State) -> Result<EigenStructure> {
    let mut es = raw_numeric(model, u)?;
    let n = es.values.len();
    let h = 1e-5 * (1.0 + u.norm());
    for i in 0..n {
        let r = es.r(i);
        let gnl = if model.linearly_degenerate(i) {
            0.0
        } else {
            let lp = raw_numeric(model, &(u + &r * h)).map(|e| e.values[i]);
            let lm = raw_numeric(model, &(u - &r * h)).map(|e| e.values[i]);
            match (lp, lm) {
                (Ok(lp), Ok(lm)) => (lp - lm) / (2.0 * h),
                _ => 0.0,
            }
        };
        let flip = if gnl.abs() > 1e-7 {
            gnl < 0.0
        } else {
            r.iter().find(|x| x.abs() > 1e-12).is_some_and(|x| *x < 0.0)
        };
        if flip {
            es.right.column_mut(i).neg_mut();
            es.left.row_mut(i).neg_mut();
        }
    }
    Ok(es)
}
