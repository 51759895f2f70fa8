//! C ABI over the `hyperctl` solver.
//!
//! Every function returns an [`HcStatus`]; on failure the message is kept in a
//! thread-local slot readable with [`hc_last_error`]. Models and simulations
//! are opaque handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

use hyperctl::flux_models::{IsentropicGas, LinearFlux};
use hyperctl::fronttrack::{Simulation, TrackingOptions};
use hyperctl::profile::PiecewiseProfile;
use hyperctl::riemann::solve_riemann;
use hyperctl::scenario::{run_scenario, Scenario};
use hyperctl::wave_curves::lax_curve;
use hyperctl::{state, Error, FluxModel};

/// Result codes. The numeric values of 2, 3 and 4 match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Solver = 3,
    Invariant = 4,
    Domain = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Opaque flux model.
pub struct HcModel {
    inner: Arc<dyn FluxModel>,
}

/// Opaque front-tracking simulation.
pub struct HcSimulation {
    inner: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> HcStatus {
    match e {
        Error::DomainViolation { .. } | Error::ChartDomain { .. } | Error::CurveExit { .. } | Error::RadiusExceeded { .. } => {
            HcStatus::Domain
        }
        Error::Io(_) => HcStatus::Io,
        _ => match e.exit_code() {
            2 => HcStatus::Config,
            4 => HcStatus::Invariant,
            _ => HcStatus::Solver,
        },
    }
}

fn guard(f: impl FnOnce() -> Result<(), HcStatus>) -> HcStatus {
    set_error(String::new());
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HcStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside hyperctl".into());
            HcStatus::Panic
        }
    }
}

fn fail(e: Error) -> HcStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> HcStatus {
    set_error(format!("{what} is null"));
    HcStatus::NullPointer
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], HcStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn out_slice<'a>(p: *mut f64, n: usize, what: &str) -> Result<&'a mut [f64], HcStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, n))
}

unsafe fn model_ref<'a>(m: *const HcModel) -> Result<&'a HcModel, HcStatus> {
    m.as_ref().ok_or_else(|| null("model"))
}

unsafe fn path_of<'a>(p: *const c_char, what: &str) -> Result<&'a Path, HcStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map(Path::new).map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        HcStatus::Config
    })
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn hc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Isentropic gas with constants `K`, `γ` in density/velocity variables.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn hc_model_gas(k: f64, gamma: f64, out: *mut *mut HcModel) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = IsentropicGas::new(k, gamma).map_err(fail)?;
        *out = Box::into_raw(Box::new(HcModel { inner: Arc::new(m) }));
        Ok(())
    })
}

/// Linear flux `f(u) = Au` from a row-major `n×n` matrix.
///
/// # Safety
/// `matrix` must point to `n*n` doubles and `out` to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn hc_model_linear(n: usize, matrix: *const f64, out: *mut *mut HcModel) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let a = slice(matrix, n * n, "matrix")?;
        let rows: Vec<Vec<f64>> = a.chunks(n.max(1)).map(<[f64]>::to_vec).collect();
        let m = LinearFlux::from_rows(&rows).map_err(fail)?;
        *out = Box::into_raw(Box::new(HcModel { inner: Arc::new(m) }));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from a `hc_model_*` constructor, freed once.
#[no_mangle]
pub unsafe extern "C" fn hc_model_free(model: *mut HcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of conserved quantities, 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_model_dim(model: *const HcModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.dim())
}

/// Point `Ψ_i(σ)(u0)` of the Lax curve of 0-based family `family`.
///
/// # Safety
/// `u0` and `out_state` must hold `n` doubles; `out_speed` may be null.
#[no_mangle]
pub unsafe extern "C" fn hc_lax_curve(
    model: *const HcModel,
    u0: *const f64,
    n: usize,
    family: usize,
    sigma: f64,
    out_state: *mut f64,
    out_speed: *mut f64,
) -> HcStatus {
    guard(|| {
        let m = model_ref(model)?;
        if n != m.inner.dim() {
            set_error(format!("state length {n} does not match model dimension {}", m.inner.dim()));
            return Err(HcStatus::Config);
        }
        let u = state(slice(u0, n, "u0")?);
        let p = lax_curve(m.inner.as_ref(), &u, family, sigma).map_err(fail)?;
        out_slice(out_state, n, "out_state")?.copy_from_slice(p.state.as_slice());
        if let Some(s) = out_speed.as_mut() {
            *s = p.speed;
        }
        Ok(())
    })
}

/// Strengths `σ_1..σ_n` of the Riemann problem `(ul, ur)`.
///
/// # Safety
/// `ul`, `ur` and `out_sigma` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn hc_riemann_solve(
    model: *const HcModel,
    ul: *const f64,
    ur: *const f64,
    n: usize,
    out_sigma: *mut f64,
) -> HcStatus {
    guard(|| {
        let m = model_ref(model)?;
        if n != m.inner.dim() {
            set_error(format!("state length {n} does not match model dimension {}", m.inner.dim()));
            return Err(HcStatus::Config);
        }
        let l = state(slice(ul, n, "ul")?);
        let r = state(slice(ur, n, "ur")?);
        let sol = solve_riemann(m.inner.as_ref(), &l, &r).map_err(fail)?;
        out_slice(out_sigma, n, "out_sigma")?.copy_from_slice(&sol.sigma);
        Ok(())
    })
}

/// Starts a simulation on `[a, b]` from piecewise-constant data with
/// `nbreaks` interior breakpoints and `nbreaks + 1` row-major states.
///
/// # Safety
/// `breaks` must hold `nbreaks` doubles, `values` `(nbreaks + 1) * dim` doubles,
/// and `out` must be a valid handle slot. The model handle may be freed afterwards.
#[no_mangle]
pub unsafe extern "C" fn hc_sim_new(
    model: *const HcModel,
    a: f64,
    b: f64,
    nbreaks: usize,
    breaks: *const f64,
    values: *const f64,
    epsilon: f64,
    out: *mut *mut HcSimulation,
) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = model_ref(model)?;
        let n = m.inner.dim();
        if epsilon.is_nan() || epsilon <= 0.0 {
            set_error(format!("epsilon = {epsilon} must be positive"));
            return Err(HcStatus::Config);
        }
        let br = slice(breaks, nbreaks, "breaks")?.to_vec();
        let vals = slice(values, (nbreaks + 1) * n, "values")?;
        let states = vals.chunks(n).map(state).collect();
        let data = PiecewiseProfile::new(a, b, br, states).map_err(fail)?;
        let sim = Simulation::new(m.inner.clone(), &data, TrackingOptions::new(epsilon)).map_err(fail)?;
        *out = Box::into_raw(Box::new(HcSimulation { inner: sim }));
        Ok(())
    })
}

/// # Safety
/// `sim` must be null or a handle from [`hc_sim_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn hc_sim_free(sim: *mut HcSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances to time `t` (no-op if `t` is not ahead of the current time).
///
/// # Safety
/// `sim` must be a live handle not used concurrently.
#[no_mangle]
pub unsafe extern "C" fn hc_sim_advance(sim: *mut HcSimulation, t: f64) -> HcStatus {
    guard(|| {
        let s = sim.as_mut().ok_or_else(|| null("sim"))?;
        s.inner.advance_to(t).map_err(fail)?;
        Ok(())
    })
}

/// Current time, NaN for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_sim_time(sim: *const HcSimulation) -> f64 {
    sim.as_ref().map_or(f64::NAN, |s| s.inner.time())
}

/// Number of fronts inside the domain.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_sim_front_count(sim: *const HcSimulation) -> usize {
    sim.as_ref().map_or(0, |s| s.inner.front_count())
}

/// Number of wave interactions resolved so far.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_sim_interaction_count(sim: *const HcSimulation) -> usize {
    sim.as_ref().map_or(0, |s| s.inner.interactions().len())
}

/// Euclidean total variation of the current profile, NaN for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_sim_total_variation(sim: *const HcSimulation) -> f64 {
    sim.as_ref().map_or(f64::NAN, |s| s.inner.snapshot().total_variation())
}

/// Value `u(t, x)` of the current profile.
///
/// # Safety
/// `out` must hold `n` doubles, `n` equal to the model dimension.
#[no_mangle]
pub unsafe extern "C" fn hc_sim_value_at(sim: *const HcSimulation, x: f64, out: *mut f64, n: usize) -> HcStatus {
    guard(|| {
        let s = sim.as_ref().ok_or_else(|| null("sim"))?;
        let snap = s.inner.snapshot();
        let u = snap.value_at(x);
        if n < u.len() {
            set_error(format!("output holds {n} values, {} needed", u.len()));
            return Err(HcStatus::BufferTooSmall);
        }
        out_slice(out, u.len(), "out")?.copy_from_slice(u.as_slice());
        Ok(())
    })
}

/// Runs a scenario file and writes its reports to `out_dir`.
///
/// # Safety
/// Both arguments must be NUL-terminated UTF-8 paths.
#[no_mangle]
pub unsafe extern "C" fn hc_run_scenario(config_path: *const c_char, out_dir: *const c_char) -> HcStatus {
    guard(|| {
        let cfg = path_of(config_path, "config_path")?;
        let out = path_of(out_dir, "out_dir")?;
        let sc = Scenario::load(cfg).map_err(fail)?;
        run_scenario(&sc, out).map_err(fail)?;
        Ok(())
    })
}
