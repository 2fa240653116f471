use std::path::Path;
use std::process::{Command, Output};

fn cdisp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdisp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn no_arguments_prints_usage_and_fails() {
    let o = cdisp(&[]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn run_without_experiment_fails() {
    let o = cdisp(&["run"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("experiment"));
}

#[test]
fn bessel_prints_fifteen_significant_digits() {
    let o = cdisp(&["bessel", "--order", "1", "--x", "1.20242"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let value = text.trim();
    let mantissa = value.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 15);
    assert!((value.parse::<f64>().unwrap() - 0.499).abs() < 5e-4);
    let o = cdisp(&["bessel", "--order", "-65", "--x", "1"]);
    assert!(!o.status.success());
}

#[test]
fn invalid_config_reports_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "experiment = \"gate-fidelity\"\n[system]\neta = 3.0\ng = 0.2\nfock_dim = 1\n").unwrap();
    let o = cdisp(&["run", "--config", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("system.fock_dim"), "{}", stderr(&o));

    std::fs::write(&path, "experiment = \"gate-fidelity\"\n[sytem]\neta = 3.0\n").unwrap();
    let o = cdisp(&["run", "--config", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("sytem"), "{}", stderr(&o));
}

#[test]
fn print_config_round_trips() {
    let o = cdisp(&["gate-fidelity", "--g", "0.3", "--seed", "11", "--print-config"]);
    assert!(o.status.success());
    let printed = stdout(&o);
    let cfg = cdisp::config::ExperimentConfig::from_toml(&printed).unwrap();
    assert_eq!(cfg.system.g, 0.3);
    assert_eq!(cfg.gate.seed, 11);
    assert_eq!(cfg.drive.alpha1, None);
    assert_eq!(cfg.to_toml().unwrap(), printed);
}

fn run_small_gate(out: &Path) -> Vec<u8> {
    let o = cdisp(&[
        "gate-fidelity", "--g", "0.1", "--trials", "5", "--seed", "3", "--fock-dim", "8", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("mean_fidelity = "));
    std::fs::read(out.join("gate_fidelity.csv")).unwrap()
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let first = run_small_gate(dir.path());
    let second = run_small_gate(dir.path());
    assert_eq!(first, second);
    let text = String::from_utf8(first).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "trial,fidelity");
    assert_eq!(rows.len(), 6);
}

#[test]
fn cat_state_writes_fock_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let o = cdisp(&["cat-state", "--steps", "1", "--fock-dim", "16", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    for key in ["fidelity = ", "abs_beta = ", "p_even = ", "p_odd = ", "ideal_amplitude = "] {
        assert!(text.contains(key), "{key}");
    }
    let csv = std::fs::read_to_string(dir.path().join("cat_fock_1step.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "n,p_even_n,p_odd_n");
    assert_eq!(rows.len(), 17);
}

#[test]
fn low_eta_warns_and_proceeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = cdisp(&[
        "validate-effective", "--eta", "1.8", "--g", "0.05", "--fock-dim", "6", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"));
    let csv = std::fs::read_to_string(dir.path().join("f1_trace_eta1.8.csv")).unwrap();
    assert!(csv.contains("\nt_over_Tr,fidelity\n"));
}

#[test]
fn sweep_reports_trend() {
    let dir = tempfile::tempdir().unwrap();
    let o = cdisp(&[
        "sweep", "--metric", "mean-f1", "--axis", "system.g=0.05:0.15:3", "--fock-dim", "10", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("trend = monotone non-increasing"), "{}", stdout(&o));
    let o = cdisp(&["sweep", "--axis", "system.g=0:1:101", "--axis", "system.eta=2:4:101"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("10201"));
}

#[test]
fn presets_are_listed() {
    let o = cdisp(&["presets"]);
    assert!(o.status.success());
    for name in ["fig2", "fig3", "gate-0948", "gate-07844", "cat-1step", "cat-2step"] {
        assert!(stdout(&o).contains(&format!("[{name}]")));
    }
}
