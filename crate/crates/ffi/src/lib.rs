//! C ABI over `cdisp`.
//!
//! Every entry point returns a [`CdispStatus`]; on failure the message is
//! available from [`cdisp_last_error`] on the same thread. Experiments are
//! opaque handles created from a preset or a TOML config and released with
//! [`cdisp_experiment_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use cdisp::config::ExperimentConfig;
use cdisp::numerics::{bessel_j, BesselOrder};
use cdisp::{experiment, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdispStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    Numerical = 4,
    Io = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Opaque experiment handle.
pub struct CdispExperiment {
    config: ExperimentConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("nul bytes removed"));
}

fn status_of(err: &Error) -> CdispStatus {
    match err {
        Error::InvalidConfig { .. } | Error::ConfigParse(_) | Error::GridTooLarge { .. } => CdispStatus::InvalidConfig,
        Error::Io { .. } => CdispStatus::Io,
        Error::NonHermitian { .. }
        | Error::NonUnitary { .. }
        | Error::PropagationAccuracy { .. }
        | Error::AmplitudeTooLarge { .. } => CdispStatus::Numerical,
        _ => CdispStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (CdispStatus, String)>) -> CdispStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CdispStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CdispStatus::Panic
        }
    }
}

fn lift<T>(r: cdisp::Result<T>) -> Result<T, (CdispStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(name: &str) -> (CdispStatus, String) {
    (CdispStatus::NullPointer, format!("`{name}` is null"))
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, (CdispStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (CdispStatus::InvalidArgument, format!("`{name}` is not UTF-8")))
}

unsafe fn handle<'a>(h: *mut CdispExperiment) -> Result<&'a mut CdispExperiment, (CdispStatus, String)> {
    h.as_mut().ok_or_else(|| null("experiment"))
}

/// Message of the most recent failure on the calling thread; empty after a
/// success. The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn cdisp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cdisp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Writes J_order(x) to `out`.
///
/// # Safety
/// `out` must be null or point to writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn cdisp_bessel_j(order: c_int, x: c_double, out: *mut c_double) -> CdispStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let order = lift(BesselOrder::try_from(order))?;
        *out = lift(bessel_j(order, x))?;
        Ok(())
    })
}

unsafe fn create(
    out: *mut *mut CdispExperiment,
    make: impl FnOnce() -> cdisp::Result<ExperimentConfig>,
) -> CdispStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let config = lift(make())?;
        lift(config.validate())?;
        *out = Box::into_raw(Box::new(CdispExperiment { config }));
        Ok(())
    })
}

/// Creates an experiment from a built-in preset (`fig2`, `fig3`,
/// `gate-0948`, `gate-07844`, `cat-1step`, `cat-2step`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cdisp_experiment_from_preset(
    name: *const c_char,
    out: *mut *mut CdispExperiment,
) -> CdispStatus {
    let name = match read_str(name, "name") {
        Ok(n) => n.to_owned(),
        Err((s, m)) => {
            set_error(m);
            return s;
        }
    };
    create(out, || ExperimentConfig::preset(&name))
}

/// Creates an experiment from TOML config text.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cdisp_experiment_from_toml(
    toml: *const c_char,
    out: *mut *mut CdispExperiment,
) -> CdispStatus {
    let text = match read_str(toml, "toml") {
        Ok(t) => t.to_owned(),
        Err((s, m)) => {
            set_error(m);
            return s;
        }
    };
    create(out, || ExperimentConfig::from_toml(&text))
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `experiment` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cdisp_experiment_free(experiment: *mut CdispExperiment) {
    if !experiment.is_null() {
        drop(Box::from_raw(experiment));
    }
}

/// Sets one of `system.eta`, `system.g`, `drive.alpha`, `drive.alpha1`,
/// `drive.alpha2`. The change is rejected if the config no longer
/// validates.
///
/// # Safety
/// `experiment` must be a live handle and `param` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cdisp_experiment_set(
    experiment: *mut CdispExperiment,
    param: *const c_char,
    value: c_double,
) -> CdispStatus {
    guard(|| {
        let h = handle(experiment)?;
        let param = read_str(param, "param")?;
        let mut next = h.config.clone();
        lift(next.set_param(param, value))?;
        lift(next.validate())?;
        h.config = next;
        Ok(())
    })
}

/// Sets the resonator Fock dimension.
///
/// # Safety
/// `experiment` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cdisp_experiment_set_fock_dim(experiment: *mut CdispExperiment, fock_dim: usize) -> CdispStatus {
    guard(|| {
        let h = handle(experiment)?;
        let mut next = h.config.clone();
        next.system.fock_dim = fock_dim;
        lift(next.validate())?;
        h.config = next;
        Ok(())
    })
}

/// Sets the directory used by [`cdisp_experiment_run`].
///
/// # Safety
/// `experiment` must be a live handle and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cdisp_experiment_set_output_dir(
    experiment: *mut CdispExperiment,
    dir: *const c_char,
) -> CdispStatus {
    guard(|| {
        let h = handle(experiment)?;
        h.config.output.dir = PathBuf::from(read_str(dir, "dir")?);
        Ok(())
    })
}

/// Runs the configured experiment and writes its result files.
///
/// # Safety
/// `experiment` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cdisp_experiment_run(experiment: *mut CdispExperiment) -> CdispStatus {
    guard(|| {
        let h = handle(experiment)?;
        lift(experiment::run(&h.config))?;
        Ok(())
    })
}

/// Average gate fidelity and its standard error over the configured random
/// states.
///
/// # Safety
/// `experiment` must be a live handle; `mean` and `std_error` writable.
#[no_mangle]
pub unsafe extern "C" fn cdisp_experiment_gate_fidelity(
    experiment: *mut CdispExperiment,
    mean: *mut c_double,
    std_error: *mut c_double,
) -> CdispStatus {
    guard(|| {
        let h = handle(experiment)?;
        if mean.is_null() || std_error.is_null() {
            return Err(null("mean/std_error"));
        }
        let report = lift(experiment::gate_fidelity(&h.config))?;
        *mean = report.mean;
        *std_error = report.std_error;
        Ok(())
    })
}

/// Cat-state fidelity and the ideal branch amplitude 2 k g_eff / omega_r.
///
/// # Safety
/// `experiment` must be a live handle; `fidelity` and `amplitude` writable.
#[no_mangle]
pub unsafe extern "C" fn cdisp_experiment_cat_fidelity(
    experiment: *mut CdispExperiment,
    fidelity: *mut c_double,
    amplitude: *mut c_double,
) -> CdispStatus {
    guard(|| {
        let h = handle(experiment)?;
        if fidelity.is_null() || amplitude.is_null() {
            return Err(null("fidelity/amplitude"));
        }
        let report = lift(experiment::cat_state(&h.config))?;
        *fidelity = report.fidelity;
        *amplitude = report.ideal_amplitude;
        Ok(())
    })
}

/// First configured F_1 trace. Writes up to `capacity` samples of time (in
/// resonator periods) and fidelity, and the full sample count to `len`;
/// returns `BufferTooSmall` when `capacity < *len`.
///
/// # Safety
/// `times` and `values` must hold `capacity` doubles; `len` writable.
#[no_mangle]
pub unsafe extern "C" fn cdisp_experiment_fidelity_trace(
    experiment: *mut CdispExperiment,
    times: *mut c_double,
    values: *mut c_double,
    capacity: usize,
    len: *mut usize,
) -> CdispStatus {
    guard(|| {
        let h = handle(experiment)?;
        if len.is_null() || (capacity > 0 && (times.is_null() || values.is_null())) {
            return Err(null("times/values/len"));
        }
        let mut cfg = h.config.clone();
        cfg.experiment = Some(cdisp::config::ExperimentKind::ValidateEffective);
        cfg.trace.eta.truncate(1);
        let traces = lift(experiment::validate_effective(&cfg))?;
        let trace = &traces[0].1;
        let n = trace.times.len();
        *len = n;
        if capacity < n {
            return Err((
                CdispStatus::BufferTooSmall,
                format!("trace has {n} samples, buffer holds {capacity}"),
            ));
        }
        for (k, (t, f)) in trace.times.iter().zip(&trace.fidelity).enumerate() {
            *times.add(k) = t / std::f64::consts::TAU;
            *values.add(k) = *f;
        }
        Ok(())
    })
}
