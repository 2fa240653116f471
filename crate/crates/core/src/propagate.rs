//! Time-dependent Schrodinger propagation.
//!
//! A [`Hamiltonian`] is a sum of constant operators weighted by scalar
//! functions of time. States are advanced on a uniform grid either by the
//! midpoint piecewise-exponential rule, psi <- exp(-i H(t + dt/2) dt) psi, or
//! by classical RK4.

use std::f64::consts::TAU;
use std::fmt;
use std::io::Write;
use std::sync::Arc;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{fidelity, HilbertLayout, Ket, Operator};
use crate::model::{self, DriveParams, DriveSchedule, SystemParams, DEFAULT_L_MAX};
use crate::numerics::linalg::C64;
use crate::numerics::sparse::Csr;

/// Admitted |norm - 1| at every step.
pub const NORM_TOLERANCE: f64 = 1e-6;
/// Default number of steps per period of the fastest frequency.
pub const DEFAULT_STEPS_PER_FASTEST_PERIOD: f64 = 800.0;
/// Coarsest admitted grid: dt <= 2 pi / (50 omega_max).
pub const MIN_STEPS_PER_FASTEST_PERIOD: f64 = 50.0;
/// Samples per resonator period recorded by default.
pub const DEFAULT_SAMPLES_PER_PERIOD: usize = 500;

type Coefficient = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

#[derive(Clone)]
struct Term {
    op: Csr,
    coefficient: Option<Coefficient>,
}

/// Time-dependent Hamiltonian H(t) = sum_k c_k(t) O_k.
#[derive(Clone)]
pub struct Hamiltonian {
    layout: HilbertLayout,
    terms: Vec<Term>,
    max_frequency: f64,
}

impl fmt::Debug for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Hamiltonian")
            .field("layout", &self.layout)
            .field("terms", &self.terms.len())
            .field("max_frequency", &self.max_frequency)
            .finish()
    }
}

impl Hamiltonian {
    /// Empty Hamiltonian; `max_frequency` is the fastest angular frequency
    /// present and sets the time step.
    pub fn new(layout: HilbertLayout, max_frequency: f64) -> Self {
        Self {
            layout,
            terms: Vec::new(),
            max_frequency,
        }
    }

    /// Time-independent Hamiltonian.
    pub fn constant(op: &Operator, max_frequency: f64) -> Self {
        let mut h = Self::new(op.layout(), max_frequency);
        h.add_static(op);
        h
    }

    pub fn add_static(&mut self, op: &Operator) {
        self.terms.push(Term {
            op: Csr::from_dense(op.matrix()),
            coefficient: None,
        });
    }

    pub fn add_term(&mut self, op: &Operator, coefficient: impl Fn(f64) -> C64 + Send + Sync + 'static) {
        self.terms.push(Term {
            op: Csr::from_dense(op.matrix()),
            coefficient: Some(Arc::new(coefficient)),
        });
    }

    /// Adds c(t) op + c(t)^* op^dag.
    pub fn add_with_adjoint(
        &mut self,
        op: &Operator,
        coefficient: impl Fn(f64) -> C64 + Send + Sync + 'static,
    ) {
        let c: Coefficient = Arc::new(coefficient);
        let c_conj = c.clone();
        self.terms.push(Term {
            op: Csr::from_dense(op.matrix()),
            coefficient: Some(c),
        });
        self.terms.push(Term {
            op: Csr::from_dense(op.dagger().matrix()),
            coefficient: Some(Arc::new(move |t| c_conj(t).conj())),
        });
    }

    pub fn layout(&self) -> HilbertLayout {
        self.layout
    }

    pub fn max_frequency(&self) -> f64 {
        self.max_frequency
    }

    /// The same Hamiltonian with its clock advanced: H'(t) = H(t + offset).
    pub fn shifted(&self, offset: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|term| Term {
                op: term.op.clone(),
                coefficient: term.coefficient.clone().map(|c| {
                    let shifted: Coefficient = Arc::new(move |t| c(t + offset));
                    shifted
                }),
            })
            .collect();
        Self {
            layout: self.layout,
            terms,
            max_frequency: self.max_frequency,
        }
    }

    fn coefficients(&self, t: f64) -> Vec<C64> {
        self.terms
            .iter()
            .map(|term| term.coefficient.as_ref().map_or(C64::new(1.0, 0.0), |c| c(t)))
            .collect()
    }

    /// out = H x with frozen coefficients.
    fn apply_frozen(&self, coefficients: &[C64], x: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (term, &c) in self.terms.iter().zip(coefficients) {
            if c.re != 0.0 || c.im != 0.0 {
                term.op.mul_add(c, x, out);
            }
        }
    }

    /// Dense H(t).
    pub fn matrix(&self, t: f64) -> Operator {
        let dim = self.layout.dim();
        let mut m = Array2::zeros((dim, dim));
        for (term, c) in self.terms.iter().zip(self.coefficients(t)) {
            term.op.to_dense_into(c, &mut m);
        }
        Operator::from_parts(self.layout, m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    PiecewiseExponential,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    #[default]
    LabDriven,
    Rotating,
    Effective,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    /// Time step; `None` selects 2 pi / (800 omega_max).
    pub dt: Option<f64>,
    pub method: Method,
    pub frame: Frame,
    /// Recorded samples per resonator period.
    pub samples_per_period: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            dt: None,
            method: Method::default(),
            frame: Frame::default(),
            samples_per_period: DEFAULT_SAMPLES_PER_PERIOD,
        }
    }
}

impl EvolutionConfig {
    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn with_samples_per_period(mut self, samples: usize) -> Self {
        self.samples_per_period = samples;
        self
    }

    /// Time step to use for a Hamiltonian whose fastest frequency is
    /// `omega_max`.
    pub fn resolve_dt(&self, omega_max: f64) -> Result<f64> {
        let omega_max = omega_max.max(1e-12);
        let max = TAU / (MIN_STEPS_PER_FASTEST_PERIOD * omega_max);
        match self.dt {
            None => Ok(TAU / (DEFAULT_STEPS_PER_FASTEST_PERIOD * omega_max)),
            Some(dt) if !(dt.is_finite() && dt > 0.0) => {
                Err(Error::param("dt", format!("must be positive, got {dt}")))
            }
            Some(dt) if dt > max * (1.0 + 1e-12) => Err(Error::StepTooLarge { dt, max }),
            Some(dt) => Ok(dt),
        }
    }
}

/// Uniform step grid with `samples` recorded points after t = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub t_end: f64,
    pub samples: usize,
    pub steps_per_sample: usize,
    pub dt: f64,
}

impl Grid {
    pub fn new(t_end: f64, omega_max: f64, cfg: &EvolutionConfig) -> Result<Self> {
        if !(t_end.is_finite() && t_end >= 0.0) {
            return Err(Error::param("t_end", format!("must be non-negative, got {t_end}")));
        }
        if cfg.samples_per_period == 0 {
            return Err(Error::param("samples_per_period", "must be at least 1"));
        }
        let dt_max = cfg.resolve_dt(omega_max)?;
        let samples = ((cfg.samples_per_period as f64 * t_end / TAU) - 1e-9).ceil().max(1.0) as usize;
        let interval = t_end / samples as f64;
        let steps_per_sample = ((interval / dt_max) - 1e-9).ceil().max(1.0) as usize;
        Ok(Self {
            t_end,
            samples,
            steps_per_sample,
            dt: interval / steps_per_sample as f64,
        })
    }

    pub fn total_steps(&self) -> usize {
        self.samples * self.steps_per_sample
    }

    pub fn sample_time(&self, k: usize) -> f64 {
        self.t_end * k as f64 / self.samples as f64
    }
}

/// Samples of an evolution.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Ket>,
    pub norms: Vec<f64>,
}

impl Trajectory {
    pub fn final_state(&self) -> &Ket {
        self.states.last().expect("trajectories hold at least the initial state")
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Single-trajectory integrator with scratch space.
struct Stepper<'a> {
    h: &'a Hamiltonian,
    method: Method,
    psi: Vec<C64>,
    scratch: [Vec<C64>; 4],
    step: usize,
}

impl<'a> Stepper<'a> {
    fn new(h: &'a Hamiltonian, psi0: &Ket, method: Method) -> Result<Self> {
        if psi0.layout() != h.layout() {
            return Err(Error::LayoutMismatch);
        }
        let drift = (psi0.norm() - 1.0).abs();
        if drift > 1e-9 {
            return Err(Error::param("psi0", format!("must be normalised (|norm - 1| = {drift:.3e})")));
        }
        let dim = h.layout().dim();
        let zeros = || vec![C64::new(0.0, 0.0); dim];
        Ok(Self {
            h,
            method,
            psi: psi0.amplitudes().to_vec(),
            scratch: [zeros(), zeros(), zeros(), zeros()],
            step: 0,
        })
    }

    fn advance(&mut self, t: f64, dt: f64) -> Result<f64> {
        match self.method {
            Method::PiecewiseExponential => self.exponential_step(t + 0.5 * dt, dt),
            Method::Rk4 => self.rk4_step(t, dt),
        }
        self.step += 1;
        let norm = self.psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let drift = (norm - 1.0).abs();
        if drift.is_nan() || drift > NORM_TOLERANCE {
            return Err(Error::PropagationAccuracy {
                step: self.step,
                time: t + dt,
                drift,
            });
        }
        Ok(norm)
    }

    /// psi <- exp(-i H(t_mid) dt) psi, summing the Taylor series of the
    /// action to machine precision.
    fn exponential_step(&mut self, t_mid: f64, dt: f64) {
        let coefficients = self.h.coefficients(t_mid);
        let [term, next, sum, _] = &mut self.scratch;
        term.copy_from_slice(&self.psi);
        sum.copy_from_slice(&self.psi);
        for k in 1..=200 {
            self.h.apply_frozen(&coefficients, term, next);
            let factor = C64::new(0.0, -dt / k as f64);
            let mut size = 0.0;
            for (t, n) in term.iter_mut().zip(next.iter()) {
                *t = factor * n;
                size += t.norm_sqr();
            }
            for (s, t) in sum.iter_mut().zip(term.iter()) {
                *s += t;
            }
            if size < 1e-34 {
                break;
            }
        }
        self.psi.copy_from_slice(sum);
    }

    fn rk4_step(&mut self, t: f64, dt: f64) {
        let h = self.h;
        let minus_i = C64::new(0.0, -1.0);
        let [k1, k2, k3, k4] = &mut self.scratch;
        let psi = &self.psi;
        let mut tmp = vec![C64::new(0.0, 0.0); psi.len()];

        let c = h.coefficients(t);
        h.apply_frozen(&c, psi, k1);
        k1.iter_mut().for_each(|z| *z *= minus_i);

        let c_mid = h.coefficients(t + 0.5 * dt);
        for (x, (p, k)) in tmp.iter_mut().zip(psi.iter().zip(k1.iter())) {
            *x = p + k * (0.5 * dt);
        }
        h.apply_frozen(&c_mid, &tmp, k2);
        k2.iter_mut().for_each(|z| *z *= minus_i);

        for (x, (p, k)) in tmp.iter_mut().zip(psi.iter().zip(k2.iter())) {
            *x = p + k * (0.5 * dt);
        }
        h.apply_frozen(&c_mid, &tmp, k3);
        k3.iter_mut().for_each(|z| *z *= minus_i);

        let c_end = h.coefficients(t + dt);
        for (x, (p, k)) in tmp.iter_mut().zip(psi.iter().zip(k3.iter())) {
            *x = p + k * dt;
        }
        h.apply_frozen(&c_end, &tmp, k4);
        k4.iter_mut().for_each(|z| *z *= minus_i);

        for i in 0..self.psi.len() {
            self.psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
    }

    fn ket(&self) -> Ket {
        Ket::new(self.h.layout(), self.psi.clone().into()).expect("finite amplitudes")
    }
}

/// Drives `stepper` across `grid`, calling `observe(k, t, norm, stepper)` at
/// every sample (k = 0 is the initial state).
fn run_grid(
    stepper: &mut Stepper<'_>,
    grid: &Grid,
    mut observe: impl FnMut(usize, f64, f64, &Stepper<'_>) -> Result<()>,
) -> Result<()> {
    observe(0, 0.0, 1.0, stepper)?;
    let mut norm = 1.0;
    for k in 0..grid.samples {
        let t0 = grid.sample_time(k);
        for j in 0..grid.steps_per_sample {
            norm = stepper.advance(t0 + j as f64 * grid.dt, grid.dt)?;
        }
        observe(k + 1, grid.sample_time(k + 1), norm, stepper)?;
    }
    Ok(())
}

/// Evolves `psi0` from t = 0 to `t_end`, recording
/// `ceil(samples_per_period * t_end / 2 pi)` uniform samples after t = 0.
pub fn evolve(h: &Hamiltonian, psi0: &Ket, t_end: f64, cfg: &EvolutionConfig) -> Result<Trajectory> {
    let grid = Grid::new(t_end, h.max_frequency(), cfg)?;
    let mut stepper = Stepper::new(h, psi0, cfg.method)?;
    let mut trajectory = Trajectory {
        times: Vec::with_capacity(grid.samples + 1),
        states: Vec::with_capacity(grid.samples + 1),
        norms: Vec::with_capacity(grid.samples + 1),
    };
    run_grid(&mut stepper, &grid, |_, t, norm, s| {
        trajectory.times.push(t);
        trajectory.states.push(s.ket());
        trajectory.norms.push(norm);
        Ok(())
    })?;
    Ok(trajectory)
}

/// Final state of [`evolve`] without storing intermediate samples.
pub fn evolve_to(h: &Hamiltonian, psi0: &Ket, t_end: f64, cfg: &EvolutionConfig) -> Result<Ket> {
    let grid = Grid::new(t_end, h.max_frequency(), cfg)?;
    let mut stepper = Stepper::new(h, psi0, cfg.method)?;
    run_grid(&mut stepper, &grid, |_, _, _, _| Ok(()))?;
    Ok(stepper.ket())
}

/// Admitted max |U^dag U - I| of a numerical propagator.
pub const PROPAGATOR_UNITARITY_TOLERANCE: f64 = 1e-7;

/// Full evolution operator U(t_end, 0), one column per basis state.
pub fn propagator(h: &Hamiltonian, t_end: f64, cfg: &EvolutionConfig) -> Result<Operator> {
    let layout = h.layout();
    let dim = layout.dim();
    let columns = (0..dim)
        .into_par_iter()
        .map(|k| {
            let mut amps = ndarray::Array1::zeros(dim);
            amps[k] = C64::new(1.0, 0.0);
            let e_k = Ket::new(layout, amps)?;
            evolve_to(h, &e_k, t_end, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut m = Array2::zeros((dim, dim));
    for (k, col) in columns.iter().enumerate() {
        m.column_mut(k).assign(col.amplitudes());
    }
    let u = Operator::from_parts(layout, m);
    let defect = u.unitarity_defect();
    if defect > PROPAGATOR_UNITARITY_TOLERANCE {
        return Err(Error::NonUnitary { defect });
    }
    Ok(u)
}

/// The time-dependent Hamiltonian of `frame` for the given parameters.
pub fn frame_hamiltonian(
    p: &SystemParams,
    d: &DriveParams,
    layout: HilbertLayout,
    frame: Frame,
) -> Result<Hamiltonian> {
    match frame {
        Frame::LabDriven => model::driven_terms(p, d, layout, DriveSchedule::Continuous),
        Frame::Rotating => model::rotating_frame_terms(p, d, layout, DEFAULT_L_MAX),
        Frame::Effective => model::effective_terms(p, d, layout),
    }
}

/// Evolves `psi0` with the Hamiltonian selected by `cfg.frame`.
pub fn evolve_in_frame(
    p: &SystemParams,
    d: &DriveParams,
    psi0: &Ket,
    t_end: f64,
    cfg: &EvolutionConfig,
) -> Result<Trajectory> {
    let h = frame_hamiltonian(p, d, psi0.layout(), cfg.frame)?;
    evolve(&h, psi0, t_end, cfg)
}

/// F_1(t) = |<psi_f(t)|psi'_f(t)>|^2 between the exact driven evolution
/// (mapped into the rotating frame) and the effective evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityTrace {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub max_norm_drift: f64,
}

impl FidelityTrace {
    pub fn min(&self) -> f64 {
        self.fidelity.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        self.fidelity.iter().sum::<f64>() / self.fidelity.len() as f64
    }

    pub const CSV_HEADER: &'static str = "t_over_Tr,fidelity";

    /// Writes `t_over_Tr,fidelity` rows with 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for (t, f) in self.times.iter().zip(&self.fidelity) {
            writeln!(w, "{:.11e},{:.11e}", t / TAU, f)?;
        }
        Ok(())
    }
}

pub fn fidelity_trace(
    p: &SystemParams,
    d: &DriveParams,
    psi0: &Ket,
    t_end: f64,
    cfg: &EvolutionConfig,
) -> Result<FidelityTrace> {
    let layout = psi0.layout();
    let exact = model::driven_terms(p, d, layout, DriveSchedule::Continuous)?;
    let effective = model::effective_terms(p, d, layout)?;
    let grid = Grid::new(t_end, exact.max_frequency(), cfg)?;

    let mut lab = Stepper::new(&exact, psi0, cfg.method)?;
    let mut eff = Stepper::new(&effective, psi0, cfg.method)?;
    let mut trace = FidelityTrace {
        times: Vec::with_capacity(grid.samples + 1),
        fidelity: Vec::with_capacity(grid.samples + 1),
        max_norm_drift: 0.0,
    };
    let mut record = |t: f64, lab: &Stepper<'_>, eff: &Stepper<'_>| -> Result<f64> {
        let rotated = model::to_rotating_frame(&lab.ket(), t, p, d)?;
        let f = fidelity(&rotated, &eff.ket())?;
        trace.times.push(t);
        trace.fidelity.push(f);
        Ok(f)
    };
    record(0.0, &lab, &eff)?;
    for k in 0..grid.samples {
        let t0 = grid.sample_time(k);
        for j in 0..grid.steps_per_sample {
            let t = t0 + j as f64 * grid.dt;
            let n_lab = lab.advance(t, grid.dt)?;
            let n_eff = eff.advance(t, grid.dt)?;
            trace.max_norm_drift = trace
                .max_norm_drift
                .max((n_lab - 1.0).abs())
                .max((n_eff - 1.0).abs());
        }
        record(grid.sample_time(k + 1), &lab, &eff)?;
    }
    Ok(trace)
}
