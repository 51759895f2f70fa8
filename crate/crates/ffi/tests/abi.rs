use std::ffi::{c_char, CString};
use std::ptr;

use hyperctl_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0u8; 512];
    let n = unsafe { hc_last_error(buf.as_mut_ptr() as *mut c_char, buf.len()) };
    buf.truncate(n.min(511));
    String::from_utf8(buf).unwrap()
}

fn gas() -> *mut HcModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { hc_model_gas(1.0, 2.0, &mut m) }, HcStatus::Ok);
    assert!(!m.is_null());
    m
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { std::ffi::CStr::from_ptr(hc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn gas_model_rejects_bad_gamma() {
    let mut m = ptr::null_mut();
    let st = unsafe { hc_model_gas(1.0, 0.5, &mut m) };
    assert_ne!(st, HcStatus::Ok);
    assert!(m.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn null_handles_are_reported() {
    let st = unsafe { hc_model_gas(1.0, 2.0, ptr::null_mut()) };
    assert_eq!(st, HcStatus::NullPointer);
    assert!(last_error().contains("out"));
    assert_eq!(unsafe { hc_model_dim(ptr::null()) }, 0);
    assert!(unsafe { hc_sim_time(ptr::null()) }.is_nan());
    unsafe {
        hc_model_free(ptr::null_mut());
        hc_sim_free(ptr::null_mut());
    }
}

#[test]
fn riemann_round_trip_through_curves() {
    let m = gas();
    assert_eq!(unsafe { hc_model_dim(m) }, 2);
    let ul = [1.0, 0.0];
    let mut mid = [0.0; 2];
    let mut ur = [0.0; 2];
    let mut speed = 0.0;
    unsafe {
        assert_eq!(hc_lax_curve(m, ul.as_ptr(), 2, 0, -0.05, mid.as_mut_ptr(), &mut speed), HcStatus::Ok);
        assert_eq!(hc_lax_curve(m, mid.as_ptr(), 2, 1, 0.03, ur.as_mut_ptr(), ptr::null_mut()), HcStatus::Ok);
    }
    assert!(speed < 0.0);
    let mut sigma = [0.0; 2];
    assert_eq!(unsafe { hc_riemann_solve(m, ul.as_ptr(), ur.as_ptr(), 2, sigma.as_mut_ptr()) }, HcStatus::Ok);
    assert!((sigma[0] + 0.05).abs() < 1e-8 && (sigma[1] - 0.03).abs() < 1e-8, "{sigma:?}");
    unsafe { hc_model_free(m) };
}

#[test]
fn dimension_mismatch_is_a_config_error() {
    let m = gas();
    let u = [1.0, 0.0, 0.0];
    let mut out = [0.0; 3];
    let st = unsafe { hc_riemann_solve(m, u.as_ptr(), u.as_ptr(), 3, out.as_mut_ptr()) };
    assert_eq!(st, HcStatus::Config);
    unsafe { hc_model_free(m) };
}

#[test]
fn out_of_domain_state_is_a_domain_error() {
    let m = gas();
    let ul = [-1.0, 0.0];
    let mut out = [0.0; 2];
    let st = unsafe { hc_lax_curve(m, ul.as_ptr(), 2, 0, 0.1, out.as_mut_ptr(), ptr::null_mut()) };
    assert_eq!(st, HcStatus::Domain);
    unsafe { hc_model_free(m) };
}

#[test]
fn simulation_outlives_model_handle() {
    let m = gas();
    let breaks = [0.5];
    let values = [1.05, 0.0, 1.0, 0.0];
    let mut sim = ptr::null_mut();
    let st = unsafe { hc_sim_new(m, 0.0, 1.0, 1, breaks.as_ptr(), values.as_ptr(), 0.01, &mut sim) };
    assert_eq!(st, HcStatus::Ok, "{}", last_error());
    unsafe { hc_model_free(m) };
    unsafe {
        let tv0 = hc_sim_total_variation(sim);
        assert!((0.05..0.1).contains(&tv0), "{tv0}");
        assert!(hc_sim_front_count(sim) >= 2);
        assert_eq!(hc_sim_advance(sim, 0.3), HcStatus::Ok);
        assert_eq!(hc_sim_time(sim), 0.3);
        let mut u = [0.0; 2];
        assert_eq!(hc_sim_value_at(sim, 0.5, u.as_mut_ptr(), 2), HcStatus::Ok);
        assert!((1.0..1.05).contains(&u[0]) && u[1] > 0.0);
        assert_eq!(hc_sim_value_at(sim, 0.5, u.as_mut_ptr(), 1), HcStatus::BufferTooSmall);
        assert_eq!(hc_sim_advance(sim, 5.0), HcStatus::Ok);
        assert_eq!(hc_sim_front_count(sim), 0);
        hc_sim_free(sim);
    }
}

#[test]
fn bad_epsilon_is_a_config_error() {
    let m = gas();
    let values = [1.0, 0.0];
    let mut sim = ptr::null_mut();
    let st = unsafe { hc_sim_new(m, 0.0, 1.0, 0, ptr::null(), values.as_ptr(), -1.0, &mut sim) };
    assert_eq!(st, HcStatus::Config);
    assert!(sim.is_null());
    unsafe { hc_model_free(m) };
}

#[test]
fn linear_model_from_row_major() {
    let a = [-1.0, 0.0, 0.0, 1.0];
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { hc_model_linear(2, a.as_ptr(), &mut m) }, HcStatus::Ok);
    assert_eq!(unsafe { hc_model_dim(m) }, 2);
    unsafe { hc_model_free(m) };
}

#[test]
fn scenario_status_matches_cli_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "schema = \"hyperctl.scenario/1\"\nexperiment = \"explode\"\n").unwrap();
    let cfg = CString::new(bad.to_str().unwrap()).unwrap();
    let out = CString::new(dir.path().join("o").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { hc_run_scenario(cfg.as_ptr(), out.as_ptr()) }, HcStatus::Config);

    let good = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/evolve_constant.toml");
    let cfg = CString::new(good).unwrap();
    assert_eq!(unsafe { hc_run_scenario(cfg.as_ptr(), out.as_ptr()) }, HcStatus::Ok);
    assert!(dir.path().join("o/manifest.json").exists());
    assert_eq!(unsafe { hc_run_scenario(ptr::null(), out.as_ptr()) }, HcStatus::NullPointer);
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hyperctl.h")).unwrap();
    for name in [
        "hc_last_error",
        "hc_version",
        "hc_model_gas",
        "hc_model_linear",
        "hc_model_free",
        "hc_model_dim",
        "hc_lax_curve",
        "hc_riemann_solve",
        "hc_sim_new",
        "hc_sim_free",
        "hc_sim_advance",
        "hc_sim_time",
        "hc_sim_front_count",
        "hc_sim_interaction_count",
        "hc_sim_total_variation",
        "hc_sim_value_at",
        "hc_run_scenario",
    ] {
        assert!(h.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(h.contains("typedef struct HcModel HcModel;"));
    assert!(h.contains("HC_STATUS_INVARIANT = 4"));
}
