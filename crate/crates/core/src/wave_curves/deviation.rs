use crate::error::{Error, Result};
use crate::flux_models::{gnl_factor, FluxModel, State};
use crate::linalg::wedge;

/// Third-order coefficient `c_i(0)` in `S_i(σ) = R_i(σ) + c_i(σ) σ³/6 r_j(u0)`,
/// where `R_i` is reparametrized so that `λ_i(R_i(σ)) = λ_i(u0) + σ`:
///
/// ```text
/// c_i(0) = ((Dr̃_i·r̃_i) ∧ r̃_i) / (2 (λ_j − λ_i) (r̃_i ∧ r_j)),   r̃_i = r_i / (Dλ_i·r_i)
/// ```
///
/// Only defined for 2×2 systems.
pub fn shock_deviation_coefficient(model: &dyn FluxModel, u0: &State, i: usize) -> Result<f64> {
    if model.dim() != 2 || i > 1 {
        return Err(Error::Precondition(
            "deviation coefficient needs a 2x2 system and family 1 or 2".into(),
        ));
    }
    let j = 1 - i;
    let h_gnl = 1e-5 * (1.0 + u0.norm());
    let tangent = |u: &State| -> Result<State> {
        let g = gnl_factor(model, u, i, h_gnl)?;
        if g.abs() < 1e-10 {
            return Err(Error::Degenerate(format!(
                "family {} is not genuinely nonlinear at {:?}",
                i + 1,
                u.as_slice()
            )));
        }
        Ok(model.eigen_structure(u)?.r(i) / g)
    };
    let a = tangent(u0)?;
    let h = 1e-3 / (1.0 + a.norm());
    let b = (tangent(&(u0 + &a * h))? - tangent(&(u0 - &a * h))?) / (2.0 * h);
    let es = model.eigen_structure(u0)?;
    let rj = es.r(j);
    let denom = 2.0 * (es.lambda(j) - es.lambda(i)) * wedge(&a, &rj);
    if denom.abs() < 1e-12 {
        return Err(Error::Degenerate("r_i and r_j are nearly parallel".into()));
    }
    Ok(wedge(&b, &a) / denom)
}
