//! Adaptive Dormand–Prince 5(4) integrator for autonomous systems `y' = g(y)`.

use nalgebra::DVector;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            max_steps: 100_000,
        }
    }
}

#[derive(Debug)]
pub enum OdeError<E> {
    Rhs(E),
    StepBudget,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = g(y)` from `s = 0` to `s = span` (either sign).
#[allow(clippy::needless_range_loop)]
pub fn integrate<G, E>(
    mut g: G,
    y0: &DVector<f64>,
    span: f64,
    opts: OdeOptions,
) -> Result<DVector<f64>, OdeError<E>>
where
    G: FnMut(&DVector<f64>) -> Result<DVector<f64>, E>,
{
    let mut y = y0.clone();
    if span == 0.0 {
        return Ok(y);
    }
    let dir = span.signum();
    let total = span.abs();
    let mut done = 0.0;
    let mut h = (total / 8.0).min(0.05);
    let _ = C;
    for _ in 0..opts.max_steps {
        if done >= total {
            return Ok(y);
        }
        h = h.min(total - done);
        let mut k: Vec<DVector<f64>> = Vec::with_capacity(7);
        k.push(g(&y).map_err(OdeError::Rhs)?);
        let mut stage_failed = false;
        for s in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                if A[s][j] != 0.0 {
                    ys.axpy(dir * h * A[s][j], kj, 1.0);
                }
            }
            match g(&ys) {
                Ok(v) => k.push(v),
                Err(e) => {
                    if h < 1e-12 * total {
                        return Err(OdeError::Rhs(e));
                    }
                    stage_failed = true;
                    break;
                }
            }
        }
        if stage_failed {
            h *= 0.25;
            continue;
        }
        let mut y5 = y.clone();
        let mut err = DVector::zeros(y.len());
        for j in 0..7 {
            y5.axpy(dir * h * B5[j], &k[j], 1.0);
            err.axpy(dir * h * (B5[j] - B4[j]), &k[j], 1.0);
        }
        let scaled = err
            .iter()
            .zip(y5.iter())
            .map(|(e, v)| e.abs() / (opts.atol + opts.rtol * v.abs()))
            .fold(0.0_f64, f64::max);
        if scaled <= 1.0 {
            y = y5;
            done += h;
            // guard against the last step overshooting through roundoff
            if total - done < 1e-15 * total {
                done = total;
            }
        }
        let factor = if scaled == 0.0 {
            5.0
        } else {
            (0.9 * scaled.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Err(OdeError::StepBudget)
}
