//! Experiment runner: turns a validated [`ExperimentConfig`] into result
//! files with a self-describing `#` comment header.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::cat::{cat_fidelity_experiment, CatReport};
use crate::config::{ExperimentConfig, ExperimentKind, SweepMetric};
use crate::error::{Error, Result};
use crate::gate::{average_gate_fidelity, GateFidelityReport};
use crate::hilbert::{Ket, Level};
use crate::model::{self, ValidityReport};
use crate::numerics::bessel_j;
use crate::propagate::{fidelity_trace, FidelityTrace};
use crate::VERSION;

/// Formats a number with 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

/// Files written and human-readable summary of one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutcome {
    pub summary: Vec<String>,
    pub warnings: Vec<String>,
    pub files: Vec<PathBuf>,
}

/// Copy of `cfg` with every experiment-dependent default made explicit.
pub fn resolved_config(cfg: &ExperimentConfig) -> ExperimentConfig {
    let mut out = cfg.clone();
    out.system.n_qubits = Some(cfg.n_qubits());
    out.system.d_coupling = Some(cfg.system.d_coupling.unwrap_or(cfg.system.g * cfg.system.g));
    let alphas = cfg.alphas();
    out.drive.alpha1 = Some(alphas[0]);
    out.drive.alpha2 = alphas.get(1).copied();
    out.drive.phi = Some(cfg.drive.phi.unwrap_or(std::f64::consts::FRAC_PI_2));
    out
}

fn validity_lines(out: &mut String, report: &ValidityReport) {
    let _ = writeln!(out, "# validity at eta = {}:", report.eta);
    for c in &report.conditions {
        let state = if c.satisfied { "ok" } else { "VIOLATED" };
        let _ = writeln!(out, "#   {}: {state} (margin {})", c.name, fmt_num(c.margin));
    }
}

/// Comment block recording tool version, resolved parameters and validity
/// margins for every eta the run touches.
pub fn header(cfg: &ExperimentConfig, etas: &[f64], results: &[String]) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "# cdisp {VERSION}");
    let _ = writeln!(out, "# resolved config:");
    for line in resolved_config(cfg).to_toml()?.lines().filter(|l| !l.is_empty()) {
        let _ = writeln!(out, "#   {line}");
    }
    if cfg.kind()? != ExperimentKind::Bessel {
        for &eta in etas {
            let r = cfg.resolve_at_eta(eta)?;
            validity_lines(&mut out, &model::validity_report(&r.system, &r.drive));
        }
    }
    for line in results {
        let _ = writeln!(out, "# {line}");
    }
    Ok(out)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn eta_warnings(etas: &[f64]) -> Vec<String> {
    etas.iter()
        .filter(|&&eta| eta <= 2.0)
        .map(|eta| format!("eta = {eta} <= 2: the effective Hamiltonian is outside its validity range; running anyway"))
        .collect()
}

/// Values of eta for which fidelity traces are computed.
pub fn trace_etas(cfg: &ExperimentConfig) -> Vec<f64> {
    if cfg.trace.eta.is_empty() {
        vec![cfg.system.eta]
    } else {
        cfg.trace.eta.clone()
    }
}

/// F_1 traces from |g...g, 0_c> for every configured eta.
pub fn validate_effective(cfg: &ExperimentConfig) -> Result<Vec<(f64, FidelityTrace)>> {
    cfg.validate()?;
    trace_etas(cfg)
        .into_par_iter()
        .map(|eta| {
            let r = cfg.resolve_at_eta(eta)?;
            let psi0 = Ket::basis(r.layout, &vec![Level::Ground; r.layout.n_qubits()], 0)?;
            let t_end = cfg.trace.periods * model::resonator_period(&r.system);
            Ok((eta, fidelity_trace(&r.system, &r.drive, &psi0, t_end, &r.evolution)?))
        })
        .collect()
}

pub fn gate_fidelity(cfg: &ExperimentConfig) -> Result<GateFidelityReport> {
    let r = cfg.resolve()?;
    average_gate_fidelity(&r.system, &r.drive, cfg.gate.trials, cfg.gate.seed, r.layout, &r.evolution)
}

pub fn cat_state(cfg: &ExperimentConfig) -> Result<CatReport> {
    let r = cfg.resolve()?;
    cat_fidelity_experiment(&r.system, &r.drive, cfg.cat.steps, r.layout.fock_dim(), &r.evolution)
}

/// Shape of a one-dimensional sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Constant,
    NonIncreasing,
    NonDecreasing,
    Mixed,
}

impl Trend {
    pub fn of(values: &[f64]) -> Trend {
        let up = values.windows(2).all(|w| w[1] >= w[0]);
        let down = values.windows(2).all(|w| w[1] <= w[0]);
        match (up, down) {
            (true, true) => Trend::Constant,
            (false, true) => Trend::NonIncreasing,
            (true, false) => Trend::NonDecreasing,
            (false, false) => Trend::Mixed,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Trend::Constant => "constant",
            Trend::NonIncreasing => "monotone non-increasing",
            Trend::NonDecreasing => "monotone non-decreasing",
            Trend::Mixed => "not monotone",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub params: Vec<String>,
    pub metric: SweepMetric,
    /// Grid coordinates and metric value, in grid-index order (last axis
    /// fastest).
    pub rows: Vec<(Vec<f64>, f64)>,
    /// Trend of the metric along a single axis.
    pub trend: Option<Trend>,
}

/// Metric of `metric` for a fully specified (non-sweep) config.
pub fn evaluate_metric(cfg: &ExperimentConfig, metric: SweepMetric) -> Result<f64> {
    let mut point = cfg.clone();
    point.trace.eta.clear();
    point.experiment = Some(match metric {
        SweepMetric::MinF1 | SweepMetric::MeanF1 => ExperimentKind::ValidateEffective,
        SweepMetric::GateFidelity => ExperimentKind::GateFidelity,
        SweepMetric::CatFidelity => ExperimentKind::CatState,
    });
    Ok(match metric {
        SweepMetric::MinF1 => validate_effective(&point)?[0].1.min(),
        SweepMetric::MeanF1 => validate_effective(&point)?[0].1.mean(),
        SweepMetric::GateFidelity => gate_fidelity(&point)?.mean,
        SweepMetric::CatFidelity => cat_state(&point)?.fidelity,
    })
}

pub fn sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let axes = &cfg.sweep.axes;
    let values: Vec<Vec<f64>> = axes.iter().map(|a| a.values()).collect();
    let mut grid: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in &values {
        grid = grid
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    let metric = cfg.sweep.metric;
    let rows = grid
        .into_par_iter()
        .map(|coords| {
            let mut point = cfg.clone();
            for (axis, &v) in axes.iter().zip(&coords) {
                point.set_param(&axis.param, v)?;
            }
            let value = evaluate_metric(&point, metric)?;
            Ok((coords, value))
        })
        .collect::<Result<Vec<_>>>()?;
    let trend = (axes.len() == 1).then(|| Trend::of(&rows.iter().map(|r| r.1).collect::<Vec<_>>()));
    Ok(SweepResult {
        params: axes.iter().map(|a| a.param.clone()).collect(),
        metric,
        rows,
        trend,
    })
}

fn sweep_etas(cfg: &ExperimentConfig) -> Vec<f64> {
    match cfg.sweep.axes.iter().find(|a| a.param == "system.eta") {
        Some(axis) => axis.values(),
        None => vec![cfg.system.eta],
    }
}

/// Runs the configured experiment and writes its result files into
/// `output.dir`. Identical configs produce byte-identical files.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let dir = &cfg.output.dir;
    let mut outcome = RunOutcome::default();
    match cfg.kind()? {
        ExperimentKind::ValidateEffective => {
            let etas = trace_etas(cfg);
            outcome.warnings = eta_warnings(&etas);
            for (eta, trace) in validate_effective(cfg)? {
                let results = vec![
                    format!("eta = {eta}"),
                    format!("min_f1 = {}", fmt_num(trace.min())),
                    format!("mean_f1 = {}", fmt_num(trace.mean())),
                    format!("max_norm_drift = {}", fmt_num(trace.max_norm_drift)),
                ];
                let mut text = header(cfg, &[eta], &results)?;
                let mut body = Vec::new();
                trace.write_csv(&mut body).expect("writing to memory");
                text.push_str(std::str::from_utf8(&body).expect("ascii"));
                outcome.files.push(write_file(dir, &format!("f1_trace_eta{eta}.csv"), &text)?);
                outcome.summary.push(results.join(" "));
            }
        }
        ExperimentKind::GateFidelity => {
            outcome.warnings = eta_warnings(&[cfg.system.eta]);
            let report = gate_fidelity(cfg)?;
            let results = vec![
                format!("mean_fidelity = {}", fmt_num(report.mean)),
                format!("std_error = {}", fmt_num(report.std_error)),
                format!("theta = {}", fmt_num(report.angle.theta)),
                format!("g_eff_ratio = {}", fmt_num(report.angle.g_eff_ratio)),
                format!("isometry_defect = {}", fmt_num(report.isometry_defect)),
            ];
            let mut text = header(cfg, &[cfg.system.eta], &results)?;
            text.push_str("trial,fidelity\n");
            for (k, f) in report.per_trial.iter().enumerate() {
                let _ = writeln!(text, "{k},{}", fmt_num(*f));
            }
            outcome.files.push(write_file(dir, "gate_fidelity.csv", &text)?);
            outcome.summary = results;
        }
        ExperimentKind::CatState => {
            outcome.warnings = eta_warnings(&[cfg.system.eta]);
            let report = cat_state(cfg)?;
            let n = &report.numerical;
            let results = vec![
                format!("steps = {}", report.steps),
                format!("fidelity = {}", fmt_num(report.fidelity)),
                format!("beta = {} + {}i", fmt_num(n.beta.re), fmt_num(n.beta.im)),
                format!("abs_beta = {}", fmt_num(n.beta.norm())),
                format!("ideal_amplitude = {}", fmt_num(report.ideal_amplitude)),
                format!("fitted_amplitude = {}", fmt_num(report.fitted_amplitude.norm())),
                format!("fitted_fidelity = {}", fmt_num(report.fitted_fidelity)),
                format!("p_even = {}", fmt_num(n.p_even)),
                format!("p_odd = {}", fmt_num(n.p_odd)),
                format!("norm_even = {}", fmt_num(n.norm_even)),
                format!("norm_odd = {}", fmt_num(n.norm_odd)),
            ];
            let mut text = header(cfg, &[cfg.system.eta], &results)?;
            text.push_str("n,p_even_n,p_odd_n\n");
            for (k, pe, po) in n.fock_distribution() {
                let _ = writeln!(text, "{k},{},{}", fmt_num(pe), fmt_num(po));
            }
            outcome.files.push(write_file(dir, &format!("cat_fock_{}step.csv", report.steps), &text)?);
            outcome.summary = results;
        }
        ExperimentKind::Bessel => {
            let value = bessel_j(cfg.bessel.order.try_into()?, cfg.bessel.x)?;
            outcome.summary.push(format!("{value:.14e}"));
        }
        ExperimentKind::Sweep => {
            let etas = sweep_etas(cfg);
            outcome.warnings = eta_warnings(&etas);
            let result = sweep(cfg)?;
            let mut results = vec![format!("metric = {}", result.metric.name())];
            if let Some(trend) = result.trend {
                results.push(format!("trend = {}", trend.describe()));
            }
            let mut text = header(cfg, &etas, &results)?;
            let columns: Vec<&str> = result.params.iter().map(String::as_str).collect();
            let _ = writeln!(text, "{},{}", columns.join(","), result.metric.name());
            for (coords, value) in &result.rows {
                let cells: Vec<String> = coords.iter().map(|&c| fmt_num(c)).collect();
                let _ = writeln!(text, "{},{}", cells.join(","), fmt_num(*value));
            }
            outcome.files.push(write_file(dir, "sweep.csv", &text)?);
            outcome.summary = results;
        }
    }
    Ok(outcome)
}
