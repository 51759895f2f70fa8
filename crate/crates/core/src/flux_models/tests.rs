use super::*;

fn gas() -> IsentropicGas {
    IsentropicGas::new(1.0, 2.0).unwrap()
}

fn diag() -> LinearFlux {
    LinearFlux::from_rows(&[vec![-1.0, 0.0], vec![0.0, 1.0]]).unwrap()
}

/// Eigenvalues of a 2×2 matrix from trace and determinant.
fn eig2(m: &DMatrix<f64>) -> (f64, f64) {
    let tr = m[(0, 0)] + m[(1, 1)];
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = (tr * tr / 4.0 - det).sqrt();
    (tr / 2.0 - disc, tr / 2.0 + disc)
}

fn fd_jac(model: &dyn FluxModel, u: &State) -> DMatrix<f64> {
    let h = 1e-6;
    DMatrix::from_fn(2, 2, |i, j| {
        let mut up = u.clone();
        let mut um = u.clone();
        up[j] += h;
        um[j] -= h;
        (model.eval_flux(&up).unwrap()[i] - model.eval_flux(&um).unwrap()[i]) / (2.0 * h)
    })
}

#[test]
fn linear_flux_evaluation() {
    let f = diag().eval_flux(&state(&[2.0, 3.0])).unwrap();
    assert_eq!(f, state(&[-2.0, 3.0]));
}

#[test]
fn gas_flux_evaluation() {
    let f = gas().eval_flux(&state(&[1.0, 0.0])).unwrap();
    assert!((f - state(&[0.0, 1.0])).norm() < 1e-15);
}

#[test]
fn negative_density_is_rejected() {
    assert!(matches!(
        gas().eval_flux(&state(&[-1.0, 0.0])),
        Err(Error::DomainViolation { .. })
    ));
}

#[test]
fn gas_exponent_out_of_range_is_rejected() {
    for gamma in [1.0, 3.0, 0.5] {
        let err = IsentropicGas::new(1.0, gamma).unwrap_err();
        assert!(err.to_string().contains("1 < gamma < 3"));
    }
}

#[test]
fn diagonal_eigenstructure() {
    let es = diag().eigen_structure(&state(&[0.0, 0.0])).unwrap();
    assert_eq!(es.values.as_slice(), &[-1.0, 1.0]);
    assert!((es.r(0) - state(&[1.0, 0.0])).norm() < 1e-14);
    assert!((es.r(1) - state(&[0.0, 1.0])).norm() < 1e-14);
}

#[test]
fn gas_eigenvalues_match_numeric_jacobian() {
    let g = gas();
    for (u, expect) in [([1.0, 0.0], (-1.0, 1.0)), ([1.0, 0.5], (-0.5, 1.5))] {
        let u = state(&u);
        let es = g.eigen_structure(&u).unwrap();
        let (l1, l2) = eig2(&fd_jac(&g, &u));
        assert!((es.lambda(0) - expect.0).abs() < 1e-14);
        assert!((es.lambda(1) - expect.1).abs() < 1e-14);
        assert!((l1 - expect.0).abs() < 1e-8 && (l2 - expect.1).abs() < 1e-8);
    }
}

#[test]
fn closed_form_and_numeric_eigenvectors_agree_for_gas() {
    let g = gas();
    for u in [[0.7, 0.1], [1.3, -0.2], [1.0, 0.0]] {
        let u = state(&u);
        let closed = g.eigen_structure(&u).unwrap();
        let numeric = numeric_eigen_structure(&g, &u).unwrap();
        for i in 0..2 {
            let a = closed.r(i).normalize();
            let b = numeric.r(i).normalize();
            assert!((a - b).norm() < 1e-8, "orientation or direction mismatch at family {i}");
            assert!((closed.lambda(i) - numeric.lambda(i)).abs() < 1e-8);
        }
        assert!(closed.biorthonormality_residual() < 1e-12);
        assert!(numeric.biorthonormality_residual() < 1e-10);
    }
}

#[test]
fn hypotheses_hold_on_small_gas_box() {
    let grid = GridSpec::new(DomainBox::new(vec![0.5, -0.2], vec![1.5, 0.2]));
    let rep = verify_hypotheses(&gas(), &grid);
    assert!(rep.admits_counterexample(), "{:?}", rep.violations.first());
    assert!(rep.worst_biorthonormality < 1e-10);
    assert!(rep.worst_eigen_residual < 1e-8);
    assert!(rep.eigenvector_orientation.margin > 0.0);
    assert!(rep.clockwise_turning.margin > 0.0);
}

#[test]
fn speed_floor_fails_when_velocity_reaches_sound_speed() {
    let grid = GridSpec::new(DomainBox::new(vec![0.9, 0.9], vec![1.1, 1.1])).per_axis(11);
    let rep = verify_hypotheses(&gas(), &grid);
    assert!(!rep.speed_floor.passed);
    assert!(!rep.admits_control());
    assert!(rep.violations.iter().any(|v| v.check == "speed_floor"));
}

#[test]
fn linear_model_passes_speed_checks() {
    let m = diag();
    assert_eq!(m.negative_families(), 1);
    let grid = GridSpec::new(DomainBox::new(vec![-1.0, -1.0], vec![1.0, 1.0])).speed_floor(1.0 - 1e-12);
    let rep = verify_hypotheses(&m, &grid);
    assert!(rep.admits_control());
    assert!((rep.speed_bounds.0 - 1.0).abs() < 1e-14);
}

#[test]
fn chart_is_anchored_and_invertible() {
    let g = gas();
    let w = g.riemann_coordinates(&state(&[1.0, 0.0])).unwrap();
    assert!(w.norm() < 1e-15);
    for u in [[0.6, 0.3], [1.4, -0.1], [1.0, 0.0]] {
        let u = state(&u);
        let back = g.state_from_coordinates(&g.riemann_coordinates(&u).unwrap()).unwrap();
        assert!((back - u).norm() < 1e-10);
    }
}

#[test]
fn second_coordinate_is_invariant_along_first_family_curves() {
    let g = gas();
    // RK4 on the unit numeric eigenvector field, independent of the chart
    let field = |u: &State| {
        let r = numeric_eigen_structure(&g, u).unwrap().r(0);
        r.normalize()
    };
    let mut u = state(&[1.0, 0.0]);
    let w2_start = g.riemann_coordinates(&u).unwrap()[1];
    let h = 0.005;
    for _ in 0..40 {
        let k1 = field(&u);
        let k2 = field(&(&u + &k1 * (h / 2.0)));
        let k3 = field(&(&u + &k2 * (h / 2.0)));
        let k4 = field(&(&u + &k3 * h));
        u += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let w2 = g.riemann_coordinates(&u).unwrap()[1];
        assert!((w2 - w2_start).abs() < 1e-6);
    }
    assert!((u - state(&[1.0, 0.0])).norm() > 0.15);
}

#[test]
fn gas_coordinates_match_closed_form() {
    let g = IsentropicGas::new(1.3, 1.4).unwrap();
    let c = |rho: f64| 1.3 * rho.powf(0.2);
    let u = state(&[0.8, 0.25]);
    let w = g.riemann_coordinates(&u).unwrap();
    let raw = |rho: f64, v: f64| (v - 2.0 * c(rho) / 0.4, v + 2.0 * c(rho) / 0.4);
    let (a1, a2) = raw(0.8, 0.25);
    let (b1, b2) = raw(1.0, 0.0);
    assert!((w[0] - (a1 - b1)).abs() < 1e-12);
    assert!((w[1] - (a2 - b2)).abs() < 1e-12);
}

#[test]
fn table_model_uses_numeric_eigenstructure() {
    let zero = vec![vec![0.0; 2]; 2];
    let m = QuadraticTable::new(
        vec![0.0, 0.0],
        vec![vec![-1.0, 0.0], vec![0.0, 1.0]],
        vec![zero.clone(), zero],
        1,
        DomainBox::unbounded(2),
    )
    .unwrap();
    let es = m.eigen_structure(&state(&[0.2, 0.3])).unwrap();
    assert!((es.lambda(0) + 1.0).abs() < 1e-8 && (es.lambda(1) - 1.0).abs() < 1e-8);
}

#[test]
fn grid_includes_corners() {
    let b = DomainBox::new(vec![0.0, -1.0], vec![1.0, 1.0]);
    let g = b.grid(3);
    assert_eq!(g.len(), 9);
    assert!(g.iter().any(|u| *u == state(&[1.0, 1.0])));
    assert!(g.iter().any(|u| *u == state(&[0.0, -1.0])));
}
