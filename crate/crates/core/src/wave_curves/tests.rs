use super::*;
use crate::flux_models::{state, DomainBox, IsentropicGas, LinearFlux, QuadraticTable};
use crate::linalg::wedge;

fn gas() -> IsentropicGas {
    IsentropicGas::new(1.0, 2.0).unwrap()
}

fn linear() -> LinearFlux {
    LinearFlux::from_rows(&[vec![-1.0, 0.5], vec![0.0, 2.0]]).unwrap()
}

fn rk4_along_chart_tangent(model: &IsentropicGas, u0: &State, i: usize, sigma: f64, steps: usize) -> State {
    let h = sigma / steps as f64;
    let r = |u: &State| model.eigen_structure(u).unwrap().r(i);
    let mut u = u0.clone();
    for _ in 0..steps {
        let k1 = r(&u);
        let k2 = r(&(&u + &k1 * (h / 2.0)));
        let k3 = r(&(&u + &k2 * (h / 2.0)));
        let k4 = r(&(&u + &k3 * h));
        u += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    u
}

#[test]
fn zero_strength_returns_base_state() {
    let g = gas();
    let u0 = state(&[1.0, 0.0]);
    for i in 0..2 {
        let r = rarefaction_curve(&g, &u0, i, 0.0).unwrap();
        assert_eq!(r.state, u0);
        let s = shock_curve(&g, &u0, i, 0.0).unwrap();
        assert_eq!(s.state, u0);
        assert!((s.speed - lambda(&g, &u0, i).unwrap()).abs() < 1e-15);
    }
}

#[test]
fn linear_rarefaction_is_straight() {
    let m = linear();
    let u0 = state(&[0.3, -0.7]);
    let es = m.eigen_structure(&u0).unwrap();
    for i in 0..2 {
        let p = rarefaction_curve(&m, &u0, i, 0.37).unwrap();
        let expect = &u0 + es.r(i) * 0.37;
        assert!((p.state - expect).norm() < 1e-14);
        assert_eq!(p.kind, WaveKind::Contact);
    }
}

#[test]
fn gas_rarefaction_matches_step_halving_integrator() {
    let g = gas();
    let u0 = state(&[1.0, 0.0]);
    let p = rarefaction_curve(&g, &u0, 1, 0.1).unwrap();
    assert!(p.speed > lambda(&g, &u0, 1).unwrap());
    let coarse = rk4_along_chart_tangent(&g, &u0, 1, 0.1, 200);
    let fine = rk4_along_chart_tangent(&g, &u0, 1, 0.1, 400);
    assert!((&coarse - &fine).norm() < 1e-10);
    assert!((p.state - fine).norm() < 1e-8);
}

#[test]
fn adaptive_integration_preserves_other_riemann_invariant() {
    let g = gas();
    let u0 = state(&[1.2, 0.1]);
    let w0 = g.riemann_coordinates(&u0).unwrap();
    for (i, s) in [(0, 0.15), (0, -0.15), (1, 0.2)] {
        let u = integrate_rarefaction(&g, &u0, i, s, OdeOptions::default()).unwrap();
        let w = g.riemann_coordinates(&u).unwrap();
        assert!((w[1 - i] - w0[1 - i]).abs() < 1e-9, "family {i}");
        assert!(((&u - &u0).norm() - s.abs()).abs() < 1e-3);
    }
}

/// `Δv² = 2 Δρ Δh / (ρ + ρ0)` with `h = K² ρ^{γ−1}/(γ−1)`.
fn gas_hugoniot_velocity_jump(k: f64, gamma: f64, rho0: f64, rho: f64) -> f64 {
    let h = |r: f64| k * k * r.powf(gamma - 1.0) / (gamma - 1.0);
    (2.0 * (rho - rho0) * (h(rho) - h(rho0)) / (rho + rho0)).sqrt()
}

#[test]
fn gas_one_shock_satisfies_rh_and_lax() {
    let g = gas();
    let u0 = state(&[1.0, 0.0]);
    let p = shock_curve(&g, &u0, 0, -0.2).unwrap();
    assert_eq!(p.kind, WaveKind::Shock);
    assert!(rh_residual(&g, &u0, &p.state, p.speed).unwrap() < 1e-10);
    let ll = lambda(&g, &u0, 0).unwrap();
    let lr = lambda(&g, &p.state, 0).unwrap();
    assert!(ll > p.speed && p.speed > lr);
    // independent closed form: compressive 1-shock has ρ > ρ0 and v < v0
    assert!(p.state[0] > 1.0);
    let dv = gas_hugoniot_velocity_jump(1.0, 2.0, 1.0, p.state[0]);
    assert!((p.state[1] + dv).abs() < 1e-12);
    let s_mass = (p.state[0] * p.state[1]) / (p.state[0] - 1.0);
    assert!((s_mass - p.speed).abs() < 1e-10);
}

#[test]
fn gas_two_shock_matches_closed_form() {
    let g = IsentropicGas::new(0.8, 1.4).unwrap();
    let u0 = state(&[0.9, 0.05]);
    let p = shock_curve(&g, &u0, 1, -0.15).unwrap();
    // 2-shock: the state behind (left) is denser, so the right state is rarer
    assert!(p.state[0] < 0.9);
    let dv = gas_hugoniot_velocity_jump(0.8, 1.4, 0.9, p.state[0]);
    assert!(((p.state[1] - 0.05).abs() - dv).abs() < 1e-12);
    assert!(p.state[1] < 0.05);
    let w0 = g.riemann_coordinates(&u0).unwrap();
    let w = g.riemann_coordinates(&p.state).unwrap();
    assert!((w[1] - w0[1] + 0.15).abs() < 1e-13);
}

#[test]
fn shock_and_rarefaction_have_second_order_tangency() {
    let g = gas();
    let u0 = state(&[1.0, 0.0]);
    for i in 0..2 {
        for sign in [-1.0, 1.0] {
            let sig = [0.2, 0.1, 0.05];
            let d: Vec<f64> = sig
                .iter()
                .map(|s| {
                    let s = sign * s;
                    let a = hugoniot_point(&g, &u0, i, s).unwrap().0;
                    let b = rarefaction_curve(&g, &u0, i, s).unwrap().state;
                    (a - b).norm()
                })
                .collect();
            let slope = (d[0].ln() - d[2].ln()) / (sig[0].ln() - sig[2].ln());
            assert!(slope >= 2.7, "family {i} sign {sign}: slope {slope}");
        }
    }
}

#[test]
fn lax_curve_branches_are_bitwise_equal() {
    let g = gas();
    let u0 = state(&[1.1, -0.05]);
    for i in 0..2 {
        assert_eq!(lax_curve(&g, &u0, i, 0.07).unwrap(), rarefaction_curve(&g, &u0, i, 0.07).unwrap());
        assert_eq!(lax_curve(&g, &u0, i, -0.07).unwrap(), shock_curve(&g, &u0, i, -0.07).unwrap());
    }
}

#[test]
fn lax_curve_is_c1_across_zero() {
    let g = gas();
    let u0 = state(&[1.0, 0.0]);
    let h = 1e-4;
    for i in 0..2 {
        let at = |s: f64| lax_curve(&g, &u0, i, s).unwrap().state;
        let plus = (at(2.0 * h) - at(h)) / h;
        let minus = (at(-h) - at(-2.0 * h)) / h;
        let central = (at(h) - at(-h)) / (2.0 * h);
        assert!((&plus - &minus).norm() < 1e-3);
        assert!((&plus - &central).norm() < 1e-3);
        // one-sided tangents to O(h) agree with the eigenvector
        let r = g.eigen_structure(&u0).unwrap().r(i);
        assert!((central - r).norm() < 1e-6);
    }
}

#[test]
fn radius_is_enforced() {
    let g = gas();
    let u0 = state(&[1.0, 0.0]);
    assert!(matches!(shock_curve(&g, &u0, 0, -0.9), Err(Error::RadiusExceeded { .. })));
}

#[test]
fn curve_leaving_the_domain_is_reported() {
    let g = gas();
    // a strong 1-rarefaction from a thin state empties the density
    let u0 = state(&[0.01, 0.0]);
    let res = rarefaction_curve(&g, &u0, 0, 0.45);
    assert!(matches!(res, Err(Error::CurveExit { family: 1, .. })));
}

#[test]
fn chartless_model_shock_curve_solves_rh() {
    let h1 = [[0.0, 0.0], [0.0, 0.0]];
    let h2 = [[0.0, 0.0], [0.0, 2.0]];
    // f = (u2, u1 + u2²): a p-system-like quadratic flux
    let m = QuadraticTable::new(
        vec![0.0, 0.0],
        vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        vec![
            h1.iter().map(|r| r.to_vec()).collect(),
            h2.iter().map(|r| r.to_vec()).collect(),
        ],
        1,
        DomainBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]),
    )
    .unwrap();
    let u0 = state(&[0.0, 0.3]);
    for i in 0..2 {
        for s in [-0.1, 0.1] {
            let p = lax_curve(&m, &u0, i, s).unwrap();
            if s < 0.0 {
                assert!(rh_residual(&m, &u0, &p.state, p.speed).unwrap() < 1e-10);
            }
            assert!((p.state - &u0).norm() > 0.09);
        }
    }
}

/// Solves `(f(P(t)) − f(u0)) ∧ (P(t) − u0) = 0` for `P(t) = base + t d` near `t = 0`.
fn hugoniot_offset(g: &IsentropicGas, u0: &State, base: &State, d: &State) -> f64 {
    let f0 = g.eval_flux(u0).unwrap();
    let chi = |t: f64| {
        let p = base + d * t;
        wedge(&(g.eval_flux(&p).unwrap() - &f0), &(p - u0))
    };
    let mut t = 0.0;
    for _ in 0..60 {
        let dt = 1e-7;
        let slope = (chi(t + dt) - chi(t - dt)) / (2.0 * dt);
        let step = chi(t) / slope;
        t -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    t
}

fn fitted_deviation(g: &IsentropicGas, u0: &State, i: usize) -> f64 {
    let j = 1 - i;
    let es = g.eigen_structure(u0).unwrap();
    let rj = es.r(j);
    // λ_i is affine in w_i along the chart for the gas model
    let rate = 0.5 + (g.gamma() - 1.0) / 4.0;
    let w0 = g.riemann_coordinates(u0).unwrap();
    let sig: Vec<f64> = (1..=10).map(|k| -0.02 * k as f64).collect();
    let mut rows = Vec::new();
    for &s in &sig {
        let mut w = w0.clone();
        w[i] += s / rate;
        let r = g.state_from_coordinates(&w).unwrap();
        let t = hugoniot_offset(g, u0, &r, &rj);
        rows.push((s, t));
    }
    // least squares t = c σ³/6 + d σ⁴
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (s, t) in rows {
        let x1 = s.powi(3) / 6.0;
        let x2 = s.powi(4);
        a11 += x1 * x1;
        a12 += x1 * x2;
        a22 += x2 * x2;
        b1 += x1 * t;
        b2 += x2 * t;
    }
    (b1 * a22 - b2 * a12) / (a11 * a22 - a12 * a12)
}

#[test]
fn deviation_coefficients_are_negative_for_gas() {
    let g = gas();
    let u0 = state(&[1.0, 0.0]);
    let c1 = shock_deviation_coefficient(&g, &u0, 0).unwrap();
    let c2 = shock_deviation_coefficient(&g, &u0, 1).unwrap();
    assert!(c1 < 0.0, "c1 = {c1}");
    assert!(c2 < 0.0, "c2 = {c2}");
}

#[test]
fn deviation_coefficient_matches_cubic_fit() {
    for (k, gamma, rho) in [(1.0, 2.0, 1.0), (0.7, 1.4, 1.3), (1.2, 2.6, 0.8)] {
        let g = IsentropicGas::new(k, gamma).unwrap();
        let u0 = state(&[rho, 0.0]);
        for i in 0..2 {
            let closed = shock_deviation_coefficient(&g, &u0, i).unwrap();
            let fit = fitted_deviation(&g, &u0, i);
            let rel = ((closed - fit) / fit).abs();
            assert!(rel < 0.05, "gamma {gamma} family {i}: closed {closed} fit {fit}");
        }
    }
}

#[test]
fn curve_csv_has_header_and_rows() {
    let g = gas();
    let pts = sample_lax_curve(&g, &state(&[1.0, 0.0]), 0, &[-0.1, 0.0, 0.1]).unwrap();
    let csv = curve_csv(&pts);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "sigma,u1,u2,speed,kind");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].ends_with("shock"));
}
