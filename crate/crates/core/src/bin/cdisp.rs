use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cdisp::config::{ExperimentConfig, ExperimentKind, SweepAxis, SweepMetric, PRESETS};
use cdisp::experiment::run;
use cdisp::propagate::Method;

/// Conditional-displacement simulator.
#[derive(Debug, Parser)]
#[command(name = "cdisp", version, arg_required_else_help = true)]
struct Cli {
    /// TOML experiment config; subcommand flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed for random trial states.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for result files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Resonator Fock-space dimension.
    #[arg(long, global = true, value_name = "N")]
    fock_dim: Option<usize>,
    /// Fixed time step in units of 1/omega_r.
    #[arg(long, global = true, value_name = "X")]
    dt: Option<f64>,
    /// Use the RK4 integrator instead of piecewise exponentials.
    #[arg(long, global = true)]
    rk4: bool,
    /// Print the resolved config as TOML instead of running.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default)]
struct Physics {
    /// omega_q / omega_r.
    #[arg(long)]
    eta: Option<f64>,
    /// Qubit-resonator coupling in units of omega_r.
    #[arg(long)]
    g: Option<f64>,
    /// Drive index alpha_1 (alpha_2 = -alpha_1 for two qubits).
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// F_1(t) traces of the exact driven dynamics against the effective model.
    ValidateEffective {
        #[command(flatten)]
        physics: Physics,
        /// Comma-separated list of eta values, one trace each.
        #[arg(long, value_delimiter = ',')]
        etas: Vec<f64>,
        /// Trace length in resonator periods.
        #[arg(long)]
        periods: Option<f64>,
    },
    /// Average fidelity of the two-qubit phase gate over random states.
    GateFidelity {
        #[command(flatten)]
        physics: Physics,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Single-qubit cat-state generation and its measurement statistics.
    CatState {
        #[command(flatten)]
        physics: Physics,
        /// Number of half-period displacement steps.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Evaluate J_order(x).
    Bessel {
        #[arg(long, allow_negative_numbers = true)]
        order: i32,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
    },
    /// Evaluate a scalar metric on a one- or two-dimensional parameter grid.
    Sweep {
        #[command(flatten)]
        physics: Physics,
        /// min-f1, mean-f1, gate-fidelity or cat-fidelity.
        #[arg(long)]
        metric: Option<String>,
        /// Swept parameter as param=start:end:points (repeat for a second axis).
        #[arg(long = "axis")]
        axes: Vec<String>,
    },
    /// Run a preset or the experiment named in --config.
    Run {
        /// One of the built-in parameter sets (see `presets`).
        #[arg(long)]
        preset: Option<String>,
    },
    /// List the built-in presets.
    Presets,
}

fn apply_physics(cfg: &mut ExperimentConfig, physics: &Physics) {
    if let Some(eta) = physics.eta {
        cfg.system.eta = eta;
    }
    if let Some(g) = physics.g {
        cfg.system.g = g;
    }
    if let Some(alpha) = physics.alpha {
        cfg.drive.alpha1 = Some(alpha);
        cfg.drive.alpha2 = (cfg.n_qubits() == 2).then_some(-alpha);
    }
}

fn build_config(cli: &Cli) -> cdisp::Result<ExperimentConfig> {
    let mut cfg = match (&cli.command, &cli.config) {
        (Command::Run { preset: Some(name) }, _) => ExperimentConfig::preset(name)?,
        (_, Some(path)) => ExperimentConfig::load(path)?,
        _ => ExperimentConfig::default(),
    };
    let kind = match &cli.command {
        Command::ValidateEffective { .. } => Some(ExperimentKind::ValidateEffective),
        Command::GateFidelity { .. } => Some(ExperimentKind::GateFidelity),
        Command::CatState { .. } => Some(ExperimentKind::CatState),
        Command::Bessel { .. } => Some(ExperimentKind::Bessel),
        Command::Sweep { .. } => Some(ExperimentKind::Sweep),
        Command::Run { .. } | Command::Presets => None,
    };
    if let Some(kind) = kind {
        if cfg.experiment != Some(kind) {
            cfg.experiment = Some(kind);
            if kind == ExperimentKind::CatState && cli.config.is_none() {
                cfg.system.n_qubits = Some(1);
            }
        }
    }
    match &cli.command {
        Command::ValidateEffective { physics, etas, periods } => {
            apply_physics(&mut cfg, physics);
            if !etas.is_empty() {
                cfg.trace.eta = etas.clone();
            }
            if let Some(p) = periods {
                cfg.trace.periods = *p;
            }
        }
        Command::GateFidelity { physics, trials } => {
            apply_physics(&mut cfg, physics);
            if let Some(t) = trials {
                cfg.gate.trials = *t;
            }
        }
        Command::CatState { physics, steps } => {
            apply_physics(&mut cfg, physics);
            if let Some(s) = steps {
                cfg.cat.steps = *s;
            }
        }
        Command::Bessel { order, x } => {
            cfg.bessel.order = *order;
            cfg.bessel.x = *x;
        }
        Command::Sweep { physics, metric, axes } => {
            if let Some(m) = metric {
                cfg.sweep.metric = m.parse::<SweepMetric>()?;
                if cfg.sweep.metric == SweepMetric::CatFidelity && cli.config.is_none() {
                    cfg.system.n_qubits = Some(1);
                }
            }
            apply_physics(&mut cfg, physics);
            if !axes.is_empty() {
                cfg.sweep.axes = axes.iter().map(|a| a.parse::<SweepAxis>()).collect::<cdisp::Result<_>>()?;
            }
        }
        Command::Run { .. } | Command::Presets => {}
    }
    if let Some(seed) = cli.seed {
        cfg.gate.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    if let Some(n) = cli.fock_dim {
        cfg.system.fock_dim = n;
    }
    if let Some(dt) = cli.dt {
        cfg.evolution.dt = Some(dt);
    }
    if cli.rk4 {
        cfg.evolution.method = Method::Rk4;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Presets = cli.command {
        for (name, text) in PRESETS {
            println!("[{name}]\n{text}");
        }
        return ExitCode::SUCCESS;
    }
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.print_config {
        return match cfg.to_toml() {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }
    match run(&cfg) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            // a closed pipe (e.g. `| head`) is not an error
            let mut stdout = std::io::stdout().lock();
            for line in &outcome.summary {
                let _ = writeln!(stdout, "{line}");
            }
            for file in &outcome.files {
                let _ = writeln!(stdout, "wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
