use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;

use super::*;
use crate::flux_models::{state, IsentropicGas, LinearFlux};
use crate::fronttrack::TrackingOptions;
use crate::profile::PiecewiseProfile;
use crate::wave_curves::shock_curve;

fn gas() -> Arc<dyn FluxModel> {
    Arc::new(IsentropicGas::new(1.0, 2.0).unwrap())
}

fn control_box() -> DomainBox {
    DomainBox::new(vec![0.8, -0.1], vec![1.2, 0.1])
}

fn gas_tau() -> f64 {
    crossing_time(gas().as_ref(), 0.0, 1.0, &control_box(), 21, 0.05).unwrap()
}

/// 1-shocks of strength `-s` each, spread evenly over (0, 1), left state `u0`.
fn shock_train(model: &dyn FluxModel, u0: &State, s: f64, count: usize) -> PiecewiseProfile {
    let mut values = vec![u0.clone()];
    for _ in 0..count {
        let next = shock_curve(model, values.last().unwrap(), 0, -s).unwrap().state;
        values.push(next);
    }
    let breaks = (1..=count).map(|k| k as f64 / (count + 1) as f64).collect();
    PiecewiseProfile::new(0.0, 1.0, breaks, values).unwrap()
}

#[test]
fn linear_crossing_time_is_one() {
    let m = LinearFlux::from_rows(&[vec![-1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let tau = crossing_time(&m, 0.0, 1.0, &DomainBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]), 5, 0.0).unwrap();
    assert!((tau - 1.0).abs() < 1e-15);
}

#[test]
fn gas_crossing_time_matches_grid_minimum() {
    let bx = DomainBox::new(vec![0.9, -0.05], vec![1.1, 0.05]);
    let tau = crossing_time(gas().as_ref(), 0.0, 1.0, &bx, 11, 0.0).unwrap();
    // |v ∓ √ρ| is smallest at ρ = 0.9 with |v| = 0.05
    let oracle = 1.0 / (0.9_f64.sqrt() - 0.05);
    assert!((tau - oracle).abs() < 1e-12, "{tau} vs {oracle}");
}

#[test]
fn box_with_sonic_point_is_rejected() {
    let bx = DomainBox::new(vec![0.9, -1.2], vec![1.1, 0.0]);
    let err = crossing_time(gas().as_ref(), 0.0, 1.0, &bx, 11, 0.0).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

fn diag() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0])
}

#[test]
fn constant_target_gives_constant_control() {
    let c = state(&[0.3, -0.2]);
    let phi = PiecewiseProfile::constant(0.0, 1.0, &c).unwrap();
    let ctl = linear_exact_control(&diag(), &phi, &phi, 1.0).unwrap();
    for t in [0.0, 0.3, 0.99] {
        for x in [0.0, 0.25, 0.7, 0.999] {
            assert!((ctl.value(t, x) - &c).norm() < 1e-15);
        }
    }
    for i in 0..2 {
        let bd = ctl.boundary_data(i);
        assert!(bd.breaks.is_empty(), "{bd:?}");
        assert!((bd.values[0] - ctl.left_eigenvectors().row(i).transpose().dot(&c)).abs() < 1e-15);
    }
}

fn indicator_target() -> PiecewiseProfile {
    PiecewiseProfile::new(
        0.0,
        1.0,
        vec![0.25, 0.5, 0.8],
        vec![state(&[0.0, 0.0]), state(&[1.0, -0.5]), state(&[0.0, 2.0]), state(&[-1.0, 0.0])],
    )
    .unwrap()
}

#[test]
fn reconstructs_target_exactly() {
    let phi = PiecewiseProfile::constant(0.0, 1.0, &state(&[0.0, 0.0])).unwrap();
    let psi = indicator_target();
    let ctl = linear_exact_control(&diag(), &phi, &psi, 1.0).unwrap();
    let end = ctl.profile_at(1.0).unwrap();
    assert_eq!(end.breaks, psi.breaks);
    assert_eq!(end.values, psi.values);
    let start = ctl.profile_at(0.0).unwrap();
    assert_eq!(start.values, phi.values);
}

#[test]
fn boundary_data_reproduce_target_by_characteristics() {
    // Oracle: trace each characteristic at time T back to either the initial
    // line or the boundary it entered from, and read off the data there.
    let a = DMatrix::from_row_slice(2, 2, &[0.5, 1.5, 1.5, 0.5]); // λ = -1, 2
    let m = LinearFlux::new(a.clone()).unwrap();
    let es = m.eigen().clone();
    let phi = PiecewiseProfile::new(0.0, 1.0, vec![0.6], vec![state(&[0.2, 0.1]), state(&[-0.3, 0.4])]).unwrap();
    let psi = indicator_target();
    let horizon = 1.3;
    let ctl = linear_exact_control(&a, &phi, &psi, horizon).unwrap();
    for &x in &[0.01, 0.2, 0.3, 0.45, 0.55, 0.7, 0.9, 0.99] {
        let mut u = State::zeros(2);
        for i in 0..2 {
            let lam = es.lambda(i);
            let foot = x - lam * horizon;
            let li = es.l(i);
            let ci = if (0.0..=1.0).contains(&foot) {
                li.dot(&phi.value_at(foot))
            } else {
                let edge = if lam < 0.0 { 1.0 } else { 0.0 };
                let t_in = horizon - (x - edge) / lam;
                ctl.boundary_data(i).eval(t_in)
            };
            u += es.r(i) * ci;
        }
        assert!((u - psi.value_at(x)).norm() < 1e-12, "x = {x}");
    }
}

#[test]
fn short_horizon_is_rejected() {
    let phi = PiecewiseProfile::constant(0.0, 1.0, &state(&[0.0, 0.0])).unwrap();
    let err = linear_exact_control(&diag(), &phi, &indicator_target(), 0.5).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn linear_control_hits_any_target(
        cuts in proptest::collection::vec(0.01f64..0.99, 0..5),
        vals in proptest::collection::vec(-2.0f64..2.0, 12),
        extra in 0.0f64..1.0,
    ) {
        let mut breaks = cuts.clone();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|p, q| (*p - *q).abs() < 1e-3);
        let values: Vec<State> = (0..=breaks.len()).map(|k| state(&[vals[2 * k], vals[2 * k + 1]])).collect();
        let psi = PiecewiseProfile::new(0.0, 1.0, breaks, values).unwrap();
        let phi = PiecewiseProfile::new(0.0, 1.0, vec![0.5], vec![state(&[1.0, 0.0]), state(&[0.0, 1.0])]).unwrap();
        let ctl = linear_exact_control(&diag(), &phi, &psi, 1.0 + extra).unwrap();
        let end = ctl.profile_at(1.0 + extra).unwrap();
        for k in 0..psi.values.len() {
            let (lo, hi) = psi.piece(k);
            let got = end.value_at(0.5 * (lo + hi));
            prop_assert!((got - psi.value(k)).norm() < 1e-14);
        }
    }
}

fn steer_opts(tau: f64, chain: f64) -> SteerOptions {
    SteerOptions {
        tau,
        delta_chain: chain,
        tracking: TrackingOptions::new(0.01),
    }
}

#[test]
fn steering_to_itself_is_empty() {
    let w = state(&[1.0, 0.0]);
    let out = steer_constant_states(gas(), 0.0, 1.0, &w, &w, &steer_opts(gas_tau(), 0.05)).unwrap();
    assert_eq!(out.hops, 0);
    assert!(out.plan.actions.is_empty());
    assert_eq!(out.final_front_count, 0);
}

#[test]
fn single_hop_reaches_target_exactly() {
    let tau = gas_tau();
    let (w0, w1) = (state(&[1.0, 0.0]), state(&[1.05, 0.02]));
    let out = steer_constant_states(gas(), 0.0, 1.0, &w0, &w1, &steer_opts(tau, 0.1)).unwrap();
    assert_eq!(out.hops, 1);
    assert!(out.final_sup_distance < 1e-8, "{}", out.final_sup_distance);
    assert_eq!(out.final_front_count, 0);
    assert!((out.horizon - 2.0 * tau).abs() < 1e-12);
    let times: Vec<f64> = out.plan.actions.iter().map(|a| a.time).collect();
    assert!(times.windows(2).all(|w| w[0] < w[1]));
    assert!(out.plan.actions.iter().all(|a| a.split_residual < 1e-10));
}

#[test]
fn four_hop_chain_passes_through_each_constant() {
    let tau = gas_tau();
    let (w0, w1) = (state(&[1.0, 0.0]), state(&[1.12, 0.03]));
    let model = gas();
    let chain = constant_chain(model.as_ref(), &w0, &w1, 0.05).unwrap();
    assert_eq!(chain.len(), 5, "expected N = 4");
    let out = steer_constant_states(model, 0.0, 1.0, &w0, &w1, &steer_opts(tau, 0.05)).unwrap();
    assert_eq!(out.hops, 4);
    assert!((out.horizon - 8.0 * tau).abs() < 1e-12);
    let sim = &out.simulation;
    for (k, omega) in chain.iter().enumerate() {
        let t = 2.0 * k as f64 * tau;
        // the left trace just before the next a-side injection is ω_k
        let (_, u) = sim
            .trace_timeline(Side::A)
            .iter()
            .rev()
            .find(|(s, _)| *s <= t + 1e-9)
            .unwrap();
        assert!((u - omega).norm() < 1e-8, "hop {k}");
    }
    assert!(out.final_sup_distance < 1e-8);
    assert_eq!(out.final_front_count, 0);
}

#[test]
fn stabilization_fixes_the_target() {
    let u = state(&[1.0, 0.0]);
    let phi = PiecewiseProfile::constant(0.0, 1.0, &u).unwrap();
    let mut sim = Simulation::new(gas(), &phi, TrackingOptions::new(0.01)).unwrap();
    let m = stabilization_step(&mut sim, &u, gas_tau(), 0.2).unwrap();
    assert_eq!(m.total_variation, 0.0);
    assert!(m.sup_distance < 1e-14);
    assert_eq!(sim.front_count(), 0);
}

#[test]
fn stabilization_step_reduces_variation() {
    let model = gas();
    let u = state(&[1.0, 0.0]);
    let phi = shock_train(model.as_ref(), &u, 0.01, 4);
    let mut sim = Simulation::new(model, &phi, TrackingOptions::new(0.01)).unwrap();
    let m = stabilization_step(&mut sim, &u, gas_tau(), 0.2).unwrap();
    assert!(m.delta_in > 0.02, "{}", m.delta_in);
    assert!(m.delta_out < m.delta_in, "{} -> {}", m.delta_in, m.delta_out);
    assert!(m.delta_out < 0.04 * 0.04 * 10.0, "{}", m.delta_out);
    assert_eq!(m.fan_b_survivors, 0);
    assert_eq!(m.fan_a_survivors, 0);
    // injected fronts obey the side/family contract
    let p = 1;
    for ev in sim.archive() {
        match ev.front.origin {
            crate::fronttrack::Origin::Boundary(Side::B) => assert!(ev.front.family < p),
            crate::fronttrack::Origin::Boundary(Side::A) => assert!(ev.front.family >= p),
            _ => {}
        }
    }
}

#[test]
fn stabilization_rejects_large_data() {
    let model = gas();
    let u = state(&[1.0, 0.0]);
    let phi = shock_train(model.as_ref(), &u, 0.1, 3);
    let mut sim = Simulation::new(model, &phi, TrackingOptions::new(0.01)).unwrap();
    let err = stabilization_step(&mut sim, &u, gas_tau(), 0.2).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn stabilize_at_the_target_stays_put() {
    let u = state(&[1.0, 0.0]);
    let phi = PiecewiseProfile::constant(0.0, 1.0, &u).unwrap();
    let (rec, _) = stabilize(gas(), &phi, &u, &StabilizeOptions::new(gas_tau(), 0.01)).unwrap();
    assert!(rec.deltas().iter().all(|&d| d == 0.0));
    assert!(rec.failure.is_none());
}

#[test]
fn stabilize_contracts_dense_shocks() {
    let model = gas();
    let u = state(&[1.0, 0.0]);
    let phi = shock_train(model.as_ref(), &u, 0.0125, 4);
    let (rec, _) = stabilize(model, &phi, &u, &StabilizeOptions::new(gas_tau(), 0.01)).unwrap();
    assert!(rec.failure.is_none(), "{:?}", rec.failure);
    let d = rec.deltas();
    assert!(d.len() >= 2, "{d:?}");
    assert!(d.windows(2).all(|w| w[1] < w[0] || w[1] < 1e-9), "{d:?}");
    let csv = rec.to_csv();
    assert!(csv.starts_with("k,t,sup_dist,tv,ratio\n"));
    let times: Vec<f64> = rec.rows.iter().map(|r| r.t).collect();
    for w in times.windows(2) {
        assert!((w[1] - w[0] - 3.0 * rec.tau).abs() < 1e-9);
    }
}

#[test]
fn far_data_triggers_the_pre_phase() {
    let model = gas();
    let phi = PiecewiseProfile::constant(0.0, 1.0, &state(&[1.0, 0.0])).unwrap();
    let target = state(&[1.12, 0.03]);
    let mut opts = StabilizeOptions::new(gas_tau(), 0.01);
    opts.delta0 = 0.05;
    let (rec, sim) = stabilize(model, &phi, &target, &opts).unwrap();
    assert!(rec.pre_phase_hops >= 2);
    assert!(sim.snapshot().sup_distance(&target) < 1e-8);
}
