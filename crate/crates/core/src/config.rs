//! Declarative experiment configuration.
//!
//! Configs are TOML documents with one table per concern; every physical
//! quantity is in units of omega_r (which is fixed to 1). Absent optional
//! keys take experiment-dependent defaults when the config is resolved.
//!
//! ```toml
//! experiment = "gate-fidelity"
//!
//! [system]
//! eta = 3.0          # omega_q / omega_r
//! g = 0.2
//! n_qubits = 2       # default: 1 for cat-state, 2 otherwise
//! fock_dim = 32
//! # d_coupling = 0.04  (default g^2)
//!
//! [drive]
//! alpha1 = 1.20242   # default: 1.832 for cat-state, 1.20242 otherwise
//! alpha2 = -1.20242  # default: -alpha1
//! # omega = 3.0      (default omega_q)
//! # phi = 1.5707963267948966  (default pi/2)
//!
//! [evolution]
//! # dt = 0.001       (default 2 pi / (800 omega_max))
//! method = "piecewise-exponential"   # or "rk4"
//! samples_per_period = 500
//!
//! [output]
//! dir = "out"
//! format = "csv"
//!
//! [gate]
//! trials = 50
//! seed = 0
//!
//! [cat]
//! steps = 1
//!
//! [trace]
//! eta = [2.5, 3.5]   # one trace per value; default [system.eta]
//! periods = 1.0
//!
//! [bessel]
//! order = 1
//! x = 1.20242
//!
//! [sweep]
//! metric = "mean-f1"  # min-f1 | mean-f1 | gate-fidelity | cat-fidelity
//! [[sweep.axis]]
//! param = "system.g"  # system.eta | system.g | drive.alpha | drive.alpha1 | drive.alpha2
//! start = 0.05
//! end = 0.5
//! points = 10
//! ```

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{HilbertLayout, DEFAULT_FOCK_DIM};
use crate::model::{DriveParams, SystemParams, ALPHA_BALANCED, ALPHA_PEAK};
use crate::propagate::{EvolutionConfig, Method, DEFAULT_SAMPLES_PER_PERIOD};

/// Largest admitted sweep grid.
pub const MAX_SWEEP_POINTS: usize = 10_000;
pub const MAX_SWEEP_AXES: usize = 2;
pub const MAX_FOCK_DIM: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ValidateEffective,
    GateFidelity,
    CatState,
    Bessel,
    Sweep,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ValidateEffective => "validate-effective",
            ExperimentKind::GateFidelity => "gate-fidelity",
            ExperimentKind::CatState => "cat-state",
            ExperimentKind::Bessel => "bessel",
            ExperimentKind::Sweep => "sweep",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub eta: f64,
    pub g: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_qubits: Option<usize>,
    #[serde(default = "default_fock_dim")]
    pub fock_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_coupling: Option<f64>,
}

fn default_fock_dim() -> usize {
    DEFAULT_FOCK_DIM
}

impl Default for SystemSection {
    fn default() -> Self {
        Self {
            eta: 3.0,
            g: 0.2,
            n_qubits: None,
            fock_dim: DEFAULT_FOCK_DIM,
            d_coupling: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default)]
    pub method: Method,
    #[serde(default = "default_samples")]
    pub samples_per_period: usize,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES_PER_PERIOD
}

impl Default for EvolutionSection {
    fn default() -> Self {
        Self {
            dt: None,
            method: Method::default(),
            samples_per_period: DEFAULT_SAMPLES_PER_PERIOD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            format: OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSection {
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_trials() -> usize {
    50
}

impl Default for GateSection {
    fn default() -> Self {
        Self { trials: 50, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatSection {
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_steps() -> usize {
    1
}

impl Default for CatSection {
    fn default() -> Self {
        Self { steps: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eta: Vec<f64>,
    #[serde(default = "default_periods")]
    pub periods: f64,
}

fn default_periods() -> f64 {
    1.0
}

impl Default for TraceSection {
    fn default() -> Self {
        Self {
            eta: Vec::new(),
            periods: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesselSection {
    pub order: i32,
    pub x: f64,
}

impl Default for BesselSection {
    fn default() -> Self {
        Self {
            order: 1,
            x: ALPHA_BALANCED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMetric {
    MinF1,
    #[default]
    MeanF1,
    GateFidelity,
    CatFidelity,
}

impl SweepMetric {
    pub fn name(self) -> &'static str {
        match self {
            SweepMetric::MinF1 => "min_f1",
            SweepMetric::MeanF1 => "mean_f1",
            SweepMetric::GateFidelity => "gate_fidelity",
            SweepMetric::CatFidelity => "cat_fidelity",
        }
    }
}

impl FromStr for SweepMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min-f1" => Ok(SweepMetric::MinF1),
            "mean-f1" => Ok(SweepMetric::MeanF1),
            "gate-fidelity" => Ok(SweepMetric::GateFidelity),
            "cat-fidelity" => Ok(SweepMetric::CatFidelity),
            _ => Err(Error::config(
                "sweep.metric",
                format!("unknown metric `{s}` (min-f1, mean-f1, gate-fidelity, cat-fidelity)"),
            )),
        }
    }
}

/// Parameters a sweep axis may vary.
pub const SWEEP_PARAMS: [&str; 5] = [
    "system.eta",
    "system.g",
    "drive.alpha",
    "drive.alpha1",
    "drive.alpha2",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: String,
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl SweepAxis {
    /// Uniform grid from `start` to `end` inclusive.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| if k + 1 == self.points { self.end } else { self.start + k as f64 * step })
            .collect()
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    /// Parses `param=start:end:points`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::config("sweep.axis", format!("expected param=start:end:points, got `{s}`"));
        let (param, range) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        Ok(SweepAxis {
            param: param.trim().to_string(),
            start: parts[0].trim().parse().map_err(|_| bad())?,
            end: parts[1].trim().parse().map_err(|_| bad())?,
            points: parts[2].trim().parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub metric: SweepMetric,
    #[serde(default, rename = "axis", skip_serializing_if = "Vec::is_empty")]
    pub axes: Vec<SweepAxis>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub drive: DriveSection,
    #[serde(default)]
    pub evolution: EvolutionSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub gate: GateSection,
    #[serde(default)]
    pub cat: CatSection,
    #[serde(default)]
    pub trace: TraceSection,
    #[serde(default)]
    pub bessel: BesselSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

/// Physics objects derived from a validated config.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub system: SystemParams,
    pub drive: DriveParams,
    pub layout: HilbertLayout,
    pub evolution: EvolutionConfig,
}

fn require(ok: bool, field: &str, reason: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(field, reason))
    }
}

fn finite(value: f64, field: &str) -> Result<()> {
    require(value.is_finite(), field, format!("must be finite, got {value}"))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    pub fn preset(name: &str) -> Result<Self> {
        let text = PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| *text)
            .ok_or_else(|| {
                let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
                Error::config("preset", format!("unknown preset `{name}` (known: {})", names.join(", ")))
            })?;
        Self::from_toml(text)
    }

    pub fn kind(&self) -> Result<ExperimentKind> {
        self.experiment
            .ok_or_else(|| Error::config("experiment", "missing; choose one of validate-effective, gate-fidelity, cat-state, bessel, sweep"))
    }

    pub fn n_qubits(&self) -> usize {
        self.system.n_qubits.unwrap_or_else(|| {
            let cat = self.experiment == Some(ExperimentKind::CatState)
                || (self.experiment == Some(ExperimentKind::Sweep)
                    && self.sweep.metric == SweepMetric::CatFidelity);
            if cat {
                1
            } else {
                2
            }
        })
    }

    pub fn alphas(&self) -> Vec<f64> {
        let default = if self.n_qubits() == 1 { ALPHA_PEAK } else { ALPHA_BALANCED };
        let a1 = self.drive.alpha1.unwrap_or(default);
        match self.n_qubits() {
            1 => vec![a1],
            _ => vec![a1, self.drive.alpha2.unwrap_or(-a1)],
        }
    }

    /// Field-level validation of every section used by the selected
    /// experiment.
    pub fn validate(&self) -> Result<()> {
        let kind = self.kind()?;
        let s = &self.system;
        finite(s.eta, "system.eta")?;
        require(s.eta > 0.0, "system.eta", "must be positive")?;
        finite(s.g, "system.g")?;
        require(s.g >= 0.0, "system.g", "must be non-negative")?;
        if let Some(n) = s.n_qubits {
            require((1..=2).contains(&n), "system.n_qubits", format!("must be 1 or 2, got {n}"))?;
        }
        require(
            (4..=MAX_FOCK_DIM).contains(&s.fock_dim),
            "system.fock_dim",
            format!("must lie in [4, {MAX_FOCK_DIM}], got {}", s.fock_dim),
        )?;
        if let Some(d) = s.d_coupling {
            finite(d, "system.d_coupling")?;
        }
        if self.drive.alpha2.is_some() && self.n_qubits() == 1 {
            return Err(Error::config("drive.alpha2", "set for a single-qubit system"));
        }
        for (field, value) in [
            ("drive.alpha1", self.drive.alpha1),
            ("drive.alpha2", self.drive.alpha2),
            ("drive.phi", self.drive.phi),
        ] {
            if let Some(v) = value {
                finite(v, field)?;
            }
        }
        if let Some(w) = self.drive.omega {
            finite(w, "drive.omega")?;
            require(w > 0.0, "drive.omega", "must be positive")?;
        }
        if let Some(dt) = self.evolution.dt {
            finite(dt, "evolution.dt")?;
            require(dt > 0.0, "evolution.dt", "must be positive")?;
        }
        require(self.evolution.samples_per_period >= 1, "evolution.samples_per_period", "must be at least 1")?;
        require((1..=100_000).contains(&self.gate.trials), "gate.trials", "must lie in [1, 100000]")?;
        // TOML integers are signed 64-bit
        require(self.gate.seed <= i64::MAX as u64, "gate.seed", format!("must be at most {}", i64::MAX))?;
        require(self.cat.steps >= 1, "cat.steps", "must be at least 1")?;
        finite(self.trace.periods, "trace.periods")?;
        require(
            self.trace.periods > 0.0 && self.trace.periods <= 100.0,
            "trace.periods",
            "must lie in (0, 100]",
        )?;
        for &eta in &self.trace.eta {
            finite(eta, "trace.eta")?;
            require(eta > 0.0, "trace.eta", "must be positive")?;
        }
        finite(self.bessel.x, "bessel.x")?;
        if kind == ExperimentKind::CatState || self.sweep_needs_single_qubit() {
            require(self.n_qubits() == 1, "system.n_qubits", "cat states need a single qubit")?;
        }
        if kind == ExperimentKind::Sweep {
            self.validate_sweep()?;
        }
        Ok(())
    }

    fn sweep_needs_single_qubit(&self) -> bool {
        self.experiment == Some(ExperimentKind::Sweep) && self.sweep.metric == SweepMetric::CatFidelity
    }

    fn validate_sweep(&self) -> Result<()> {
        let axes = &self.sweep.axes;
        require(!axes.is_empty(), "sweep.axis", "at least one axis is required")?;
        require(
            axes.len() <= MAX_SWEEP_AXES,
            "sweep.axis",
            format!("at most {MAX_SWEEP_AXES} axes, got {}", axes.len()),
        )?;
        let mut points = 1usize;
        for (k, axis) in axes.iter().enumerate() {
            let field = format!("sweep.axis[{k}]");
            require(
                SWEEP_PARAMS.contains(&axis.param.as_str()),
                &format!("{field}.param"),
                format!("unknown parameter `{}` (known: {})", axis.param, SWEEP_PARAMS.join(", ")),
            )?;
            finite(axis.start, &format!("{field}.start"))?;
            finite(axis.end, &format!("{field}.end"))?;
            require(axis.points >= 1, &format!("{field}.points"), "must be at least 1")?;
            points = points.saturating_mul(axis.points);
        }
        if axes.len() == 2 {
            require(axes[0].param != axes[1].param, "sweep.axis", "the two axes vary the same parameter")?;
        }
        if points > MAX_SWEEP_POINTS {
            return Err(Error::GridTooLarge {
                points,
                max: MAX_SWEEP_POINTS,
            });
        }
        Ok(())
    }

    /// Validates and builds the physics objects for `system.eta`.
    pub fn resolve(&self) -> Result<Resolved> {
        self.validate()?;
        self.resolve_at_eta(self.system.eta)
    }

    /// As [`resolve`](Self::resolve) with the qubit splitting replaced by
    /// `eta`; the drive frequency follows unless `drive.omega` is set.
    pub fn resolve_at_eta(&self, eta: f64) -> Result<Resolved> {
        let mut system = SystemParams::new(self.n_qubits(), eta, self.system.g)?;
        if let Some(d) = self.system.d_coupling {
            system = system.with_d_coupling(d)?;
        }
        let omega = self.drive.omega.unwrap_or(system.omega_q);
        let phi = self.drive.phi.unwrap_or(FRAC_PI_2);
        let drive = DriveParams::from_alphas(&self.alphas(), omega, phi)?;
        let layout = system.layout(self.system.fock_dim)?;
        let mut evolution = EvolutionConfig::default()
            .with_method(self.evolution.method)
            .with_samples_per_period(self.evolution.samples_per_period);
        if let Some(dt) = self.evolution.dt {
            evolution = evolution.with_dt(dt);
        }
        Ok(Resolved {
            system,
            drive,
            layout,
            evolution,
        })
    }

    /// Applies `value` to a sweepable parameter.
    pub fn set_param(&mut self, param: &str, value: f64) -> Result<()> {
        match param {
            "system.eta" => self.system.eta = value,
            "system.g" => self.system.g = value,
            "drive.alpha" => {
                self.drive.alpha1 = Some(value);
                if self.n_qubits() == 2 {
                    self.drive.alpha2 = Some(-value);
                }
            }
            "drive.alpha1" => self.drive.alpha1 = Some(value),
            "drive.alpha2" => self.drive.alpha2 = Some(value),
            _ => return Err(Error::config("sweep.axis.param", format!("unknown parameter `{param}`"))),
        }
        Ok(())
    }
}

/// Named parameter sets of the reference results.
pub const PRESETS: [(&str, &str); 6] = [
    (
        "fig2",
        r#"experiment = "validate-effective"
[system]
eta = 3.5
g = 0.2
n_qubits = 2
[drive]
alpha1 = 1.20242
alpha2 = -1.20242
[trace]
eta = [2.5, 3.5]
"#,
    ),
    (
        "fig3",
        r#"experiment = "validate-effective"
[system]
eta = 3.0
g = 0.5
n_qubits = 2
[drive]
alpha1 = 1.20242
alpha2 = -1.20242
"#,
    ),
    (
        "gate-0948",
        r#"experiment = "gate-fidelity"
[system]
eta = 3.0
g = 0.2
n_qubits = 2
[drive]
alpha1 = 1.20242
alpha2 = -1.20242
[gate]
trials = 50
seed = 2024
"#,
    ),
    (
        "gate-07844",
        r#"experiment = "gate-fidelity"
[system]
eta = 3.0
g = 0.5
n_qubits = 2
[drive]
alpha1 = 1.20242
alpha2 = -1.20242
[gate]
trials = 50
seed = 2024
"#,
    ),
    (
        "cat-1step",
        r#"experiment = "cat-state"
[system]
eta = 3.0
g = 0.2
n_qubits = 1
[drive]
alpha1 = 1.832
[cat]
steps = 1
"#,
    ),
    (
        "cat-2step",
        r#"experiment = "cat-state"
[system]
eta = 3.0
g = 0.2
n_qubits = 1
[drive]
alpha1 = 1.832
[cat]
steps = 2
"#,
    ),
];
