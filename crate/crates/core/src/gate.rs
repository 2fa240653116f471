//! Two-qubit phase gate generated by the conditional-displacement
//! interaction, its local invariants, and the numerical average-fidelity
//! experiment.

use std::f64::consts::{PI, TAU};

use ndarray::{array, Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{ladder, pauli_on, HilbertLayout, Ket, Operator, PauliAxis};
use crate::model::{self, DriveParams, DriveSchedule, SystemParams};
use crate::numerics::expm_skew_hermitian;
use crate::numerics::linalg::{self, CMatrix, C64, I};
use crate::propagate::{evolve_to, propagator, EvolutionConfig};

/// Gate angle theta = 4 pi (g_eff / omega_r)^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateAngle {
    pub theta: f64,
    pub g_eff_ratio: f64,
}

impl GateAngle {
    pub fn from_coupling(g_eff_ratio: f64) -> Self {
        Self {
            theta: 4.0 * PI * g_eff_ratio * g_eff_ratio,
            g_eff_ratio,
        }
    }
}

/// beta(t) = r (1 - e^{i omega_r t}) and Phi(t) = r^2 (omega_r t - sin omega_r t)
/// for r = g_eff / omega_r (time in units of 1 / omega_r).
pub fn beta_phi(g_eff_ratio: f64, t: f64) -> (C64, f64) {
    let r = g_eff_ratio;
    let beta = r * (C64::new(1.0, 0.0) - C64::from_polar(1.0, t));
    let phase = r * r * (t - t.sin());
    (beta, phase)
}

/// Closed-form gate data at the end of one resonator period.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticGate {
    pub beta: C64,
    pub phase: f64,
    pub qubit_matrix: CMatrix,
}

impl AnalyticGate {
    pub fn at_period(g_eff_ratio: f64) -> Self {
        let (beta, phase) = beta_phi(g_eff_ratio, TAU);
        let angle = GateAngle::from_coupling(g_eff_ratio);
        Self {
            beta,
            phase,
            qubit_matrix: phase_gate_matrix(angle.theta),
        }
    }
}

/// U(t) = D[beta_hat(t) X] exp(i Phi_hat(t) X^2) for X = sum_m c_m sigma_x^m,
/// where `couplings` holds c_m = g_eff^m / omega_r and beta_hat, Phi_hat are
/// beta, Phi at unit coupling. This solves the effective Hamiltonian exactly.
pub fn conditional_displacement_unitary(
    couplings: &[f64],
    t: f64,
    layout: HilbertLayout,
) -> Result<Operator> {
    if couplings.len() != layout.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: layout.n_qubits(),
            found: couplings.len(),
        });
    }
    let (beta_unit, phase_unit) = beta_phi(1.0, t);
    let spread: f64 = couplings.iter().map(|c| c.abs()).sum();
    layout.check_displacement(beta_unit.norm() * spread)?;

    let mut x = Operator::zeros(layout);
    for (m, &c) in couplings.iter().enumerate() {
        x = &x + &pauli_on(m, PauliAxis::X, layout)?.scaled(C64::from(c));
    }
    let (a, a_dag) = ladder(layout);
    // D = exp(G) with G = beta a^dag X - beta^* a X, i.e. exp(-i H) for H = i G
    let generator = &(&a_dag * &x).scaled(beta_unit) - &(&a * &x).scaled(beta_unit.conj());
    let displacement = Operator::from_parts(
        layout,
        expm_skew_hermitian(&(generator.matrix() * I), 1.0)?,
    );
    let x2 = &x * &x;
    let phase = Operator::from_parts(layout, expm_skew_hermitian(&(x2.matrix() * -phase_unit), 1.0)?);
    Ok(&displacement * &phase)
}

/// Analytic evolution operator for g_eff^1 = -g_eff^2 = g_eff (two qubits,
/// X = g_eff J_x with J_x = sigma_x^1 - sigma_x^2) or a single qubit
/// (X = g_eff sigma_x).
pub fn analytic_unitary(g_eff_ratio: f64, t: f64, layout: HilbertLayout) -> Result<Operator> {
    let couplings: Vec<f64> = match layout.n_qubits() {
        1 => vec![g_eff_ratio],
        _ => vec![g_eff_ratio, -g_eff_ratio],
    };
    conditional_displacement_unitary(&couplings, t, layout)
}

/// Block <q, 0| U |q', 0> of an operator acting on the register (the
/// resonator vacuum block).
pub fn register_block(u: &Operator) -> CMatrix {
    let q = u.layout().qubit_dim();
    Array2::from_shape_fn((q, q), |(i, j)| u.element((i, 0), (j, 0)))
}

/// Largest deviation of `u` from the product form `register_block(u) (x) I`.
pub fn product_form_defect(u: &Operator) -> f64 {
    let block = register_block(u);
    let product = linalg::kron(&block, &linalg::identity(u.layout().fock_dim()));
    linalg::max_abs_diff(u.matrix(), &product)
}

/// e^{i theta} e^{-i theta sigma_x^1 sigma_x^2} in the basis
/// {|ee>, |eg>, |ge>, |gg>}.
pub fn phase_gate_matrix(theta: f64) -> CMatrix {
    let c = C64::from(theta.cos());
    let s = C64::new(0.0, -theta.sin());
    let o = C64::new(0.0, 0.0);
    let m = array![[c, o, o, s], [o, c, s, o], [o, s, c, o], [s, o, o, c]];
    m * C64::from_polar(1.0, theta)
}

/// The two local invariants of a two-qubit gate: complex G1 and real G2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalInvariants {
    pub g1: C64,
    pub g2: f64,
}

impl LocalInvariants {
    pub fn distance(&self, other: &LocalInvariants) -> f64 {
        (self.g1 - other.g1).norm().max((self.g2 - other.g2).abs())
    }
}

fn magic_basis() -> CMatrix {
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    array![[l, o, o, I], [o, I, l, o], [o, I, -l, o], [l, o, o, -I]] * C64::from(s)
}

/// Makhlin invariants G1 = tr^2(m) / (16 det U) and
/// G2 = (tr^2(m) - tr(m^2)) / (4 det U), with m = U_B^T U_B in the magic basis.
pub fn makhlin_invariants(u: &CMatrix) -> Result<LocalInvariants> {
    if u.nrows() != 4 || u.ncols() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: u.nrows(),
        });
    }
    let defect = linalg::unitarity_defect(u);
    if defect > 1e-8 {
        return Err(Error::NonUnitary { defect });
    }
    let q = magic_basis();
    let ub = linalg::dagger(&q).dot(u).dot(&q);
    let m = ub.t().dot(&ub);
    let det = linalg::determinant(u);
    let tr = linalg::trace(&m);
    let tr_sq = linalg::trace(&m.dot(&m));
    Ok(LocalInvariants {
        g1: tr * tr / (16.0 * det),
        g2: ((tr * tr - tr_sq) / (4.0 * det)).re,
    })
}

/// Outcome of [`average_gate_fidelity`].
#[derive(Debug, Clone, PartialEq)]
pub struct GateFidelityReport {
    pub mean: f64,
    pub std_error: f64,
    pub per_trial: Vec<f64>,
    pub angle: GateAngle,
    /// max |B^dag B - I| for the computed vacuum block B of U'(T).
    pub isometry_defect: f64,
}

/// Normalised register amplitudes with i.i.d. complex standard-normal
/// components.
pub fn random_register_states(n_qubits: usize, n_trials: usize, seed: u64) -> Vec<Array1<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 1 << n_qubits;
    (0..n_trials)
        .map(|_| {
            let a: Array1<C64> = (0..dim)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    C64::new(re, im)
                })
                .collect();
            let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            a / C64::from(norm)
        })
        .collect()
}

/// Numerical propagator of the driven lab Hamiltonian over one resonator
/// period, mapped into the rotating frame: U^dag(T) U_lab(T) U(0).
pub fn rotating_frame_propagator(
    p: &SystemParams,
    d: &DriveParams,
    layout: HilbertLayout,
    cfg: &EvolutionConfig,
) -> Result<Operator> {
    let period = model::resonator_period(p);
    let h = model::driven_terms(p, d, layout, DriveSchedule::Continuous)?;
    let u_lab = propagator(&h, period, cfg)?;
    let frame_end = model::frame_transform(period, p, d, layout)?;
    let frame_start = model::frame_transform(0.0, p, d, layout)?;
    Ok(&(&frame_end.dagger() * &u_lab) * &frame_start)
}

/// Images of |q, 0_c> for every register basis state q under the
/// numerical rotating-frame propagator, as columns of a `dim x 2^n` matrix.
pub fn vacuum_block_columns(
    p: &SystemParams,
    d: &DriveParams,
    layout: HilbertLayout,
    cfg: &EvolutionConfig,
) -> Result<CMatrix> {
    let period = model::resonator_period(p);
    let h = model::driven_terms(p, d, layout, DriveSchedule::Continuous)?;
    let start = model::frame_phases(0.0, p, d, layout);
    let end = model::frame_phases(period, p, d, layout);
    let columns = (0..layout.qubit_dim())
        .into_par_iter()
        .map(|q| {
            let k = layout.index(q, 0);
            let mut amps = Array1::zeros(layout.dim());
            amps[k] = start[k];
            let evolved = evolve_to(&h, &Ket::new(layout, amps)?, period, cfg)?;
            Ok(evolved
                .amplitudes()
                .iter()
                .zip(&end)
                .map(|(a, u)| u.conj() * a)
                .collect::<Array1<C64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut m = Array2::zeros((layout.dim(), layout.qubit_dim()));
    for (q, col) in columns.iter().enumerate() {
        m.column_mut(q).assign(col);
    }
    Ok(m)
}

/// Mean over random register states |psi(a)> (x) |0_c> of
/// |<psi_ideal| U'(T) |psi(a)>|^2, where psi_ideal is the analytic gate applied
/// to the same state and U'(T) the numerical rotating-frame propagator.
///
/// Only the vacuum block of U'(T) is needed, so 2^n trajectories are
/// integrated instead of the full propagator.
pub fn average_gate_fidelity(
    p: &SystemParams,
    d: &DriveParams,
    n_trials: usize,
    seed: u64,
    layout: HilbertLayout,
    cfg: &EvolutionConfig,
) -> Result<GateFidelityReport> {
    if n_trials == 0 {
        return Err(Error::param("n_trials", "must be at least 1"));
    }
    let couplings: Vec<f64> = model::effective_couplings(p, d)
        .into_iter()
        .map(|g| g / p.omega_r)
        .collect();
    let ideal = conditional_displacement_unitary(&couplings, model::resonator_period(p), layout)?;
    let block = vacuum_block_columns(p, d, layout, cfg)?;
    let isometry_defect = linalg::max_abs_diff(
        &linalg::dagger(&block).dot(&block),
        &linalg::identity(layout.qubit_dim()),
    );

    let mut vacuum = vec![C64::new(0.0, 0.0); layout.fock_dim()];
    vacuum[0] = C64::new(1.0, 0.0);
    let per_trial = random_register_states(layout.n_qubits(), n_trials, seed)
        .into_par_iter()
        .map(|a| {
            let psi = Ket::product(layout, a.as_slice().expect("contiguous"), &vacuum)?;
            let target = ideal.apply(&psi)?;
            let evolved = Ket::new(layout, block.dot(&a))?;
            Ok(target.inner(&evolved)?.norm_sqr())
        })
        .collect::<Result<Vec<f64>>>()?;

    let n = per_trial.len() as f64;
    let mean = per_trial.iter().sum::<f64>() / n;
    let std_error = if per_trial.len() > 1 {
        let var = per_trial.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(GateFidelityReport {
        mean,
        std_error,
        per_trial,
        angle: GateAngle::from_coupling(couplings[0]),
        isometry_defect,
    })
}
