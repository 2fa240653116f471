use std::ffi::{CStr, CString};
use std::ptr;

use cdisp_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cdisp_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(cdisp_version()) };
    assert_eq!(v.to_str().unwrap(), cdisp::VERSION);
}

#[test]
fn bessel_values_and_errors() {
    let mut out = 0.0;
    assert_eq!(unsafe { cdisp_bessel_j(1, 1.832, &mut out) }, CdispStatus::Ok);
    assert!((out - 0.582).abs() < 5e-4);
    assert_eq!(last_error(), "");
    assert_eq!(unsafe { cdisp_bessel_j(65, 1.0, &mut out) }, CdispStatus::InvalidArgument);
    assert!(last_error().contains("65"));
    assert_eq!(unsafe { cdisp_bessel_j(1, f64::NAN, &mut out) }, CdispStatus::InvalidArgument);
    assert_eq!(unsafe { cdisp_bessel_j(1, 1.0, ptr::null_mut()) }, CdispStatus::NullPointer);
}

#[test]
fn handle_lifecycle_and_config_errors() {
    let mut h: *mut CdispExperiment = ptr::null_mut();
    let name = CString::new("fig9").unwrap();
    assert_eq!(unsafe { cdisp_experiment_from_preset(name.as_ptr(), &mut h) }, CdispStatus::InvalidConfig);
    assert!(h.is_null());
    assert!(last_error().contains("fig9"));

    let bad = CString::new("experiment = \"gate-fidelity\"\n[system]\neta = 3.0\ng = -1.0\n").unwrap();
    assert_eq!(unsafe { cdisp_experiment_from_toml(bad.as_ptr(), &mut h) }, CdispStatus::InvalidConfig);
    assert!(last_error().contains("system.g"));

    let name = CString::new("gate-0948").unwrap();
    assert_eq!(unsafe { cdisp_experiment_from_preset(name.as_ptr(), &mut h) }, CdispStatus::Ok);
    assert!(!h.is_null());
    let param = CString::new("system.g").unwrap();
    assert_eq!(unsafe { cdisp_experiment_set(h, param.as_ptr(), -0.5) }, CdispStatus::InvalidConfig);
    let unknown = CString::new("system.omega").unwrap();
    assert_eq!(unsafe { cdisp_experiment_set(h, unknown.as_ptr(), 1.0) }, CdispStatus::InvalidConfig);
    assert_eq!(unsafe { cdisp_experiment_set_fock_dim(h, 2) }, CdispStatus::InvalidConfig);
    unsafe { cdisp_experiment_free(h) };
    unsafe { cdisp_experiment_free(ptr::null_mut()) };

    assert_eq!(unsafe { cdisp_experiment_run(ptr::null_mut()) }, CdispStatus::NullPointer);
}

fn small(toml: &str) -> *mut CdispExperiment {
    let mut h = ptr::null_mut();
    let text = CString::new(toml).unwrap();
    assert_eq!(unsafe { cdisp_experiment_from_toml(text.as_ptr(), &mut h) }, CdispStatus::Ok, "{}", last_error());
    h
}

#[test]
fn trivial_gate_and_cat_through_the_abi() {
    let h = small("experiment = \"gate-fidelity\"\n[system]\neta = 3.0\ng = 0.0\nfock_dim = 6\n[gate]\ntrials = 4\n");
    let (mut mean, mut err) = (0.0, 0.0);
    assert_eq!(unsafe { cdisp_experiment_gate_fidelity(h, &mut mean, &mut err) }, CdispStatus::Ok);
    assert!((mean - 1.0).abs() < 1e-9);
    unsafe { cdisp_experiment_free(h) };

    let h = small("experiment = \"cat-state\"\n[system]\neta = 3.0\ng = 0.0\nfock_dim = 6\n");
    let (mut f, mut amp) = (0.0, 1.0);
    assert_eq!(unsafe { cdisp_experiment_cat_fidelity(h, &mut f, &mut amp) }, CdispStatus::Ok);
    assert!((f - 1.0).abs() < 1e-9);
    assert_eq!(amp, 0.0);
    unsafe { cdisp_experiment_free(h) };
}

#[test]
fn fidelity_trace_buffer_protocol() {
    let h = small(
        "experiment = \"validate-effective\"\n[system]\neta = 3.0\ng = 0.0\nfock_dim = 6\n[evolution]\nsamples_per_period = 10\n",
    );
    let mut len = 0usize;
    let status = unsafe { cdisp_experiment_fidelity_trace(h, ptr::null_mut(), ptr::null_mut(), 0, &mut len) };
    assert_eq!(status, CdispStatus::BufferTooSmall);
    assert_eq!(len, 11);
    let mut t = vec![0.0; len];
    let mut v = vec![0.0; len];
    let status = unsafe { cdisp_experiment_fidelity_trace(h, t.as_mut_ptr(), v.as_mut_ptr(), len, &mut len) };
    assert_eq!(status, CdispStatus::Ok);
    assert_eq!(t[0], 0.0);
    assert!((t[10] - 1.0).abs() < 1e-12);
    assert!(v.iter().all(|f| (f - 1.0).abs() < 1e-9));
    unsafe { cdisp_experiment_free(h) };
}

#[test]
fn run_writes_result_files() {
    let dir = tempfile_dir();
    let h = small("experiment = \"cat-state\"\n[system]\neta = 3.0\ng = 0.05\nfock_dim = 8\n");
    let d = CString::new(dir.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { cdisp_experiment_set_output_dir(h, d.as_ptr()) }, CdispStatus::Ok);
    assert_eq!(unsafe { cdisp_experiment_run(h) }, CdispStatus::Ok, "{}", last_error());
    let text = std::fs::read_to_string(dir.join("cat_fock_1step.csv")).unwrap();
    assert!(text.starts_with("# cdisp "));
    assert!(text.contains("\nn,p_even_n,p_odd_n\n"));
    unsafe { cdisp_experiment_free(h) };
    std::fs::remove_dir_all(dir).unwrap();
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("cdisp-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
