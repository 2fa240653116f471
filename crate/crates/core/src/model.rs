//! Hamiltonians of the driven qubit(s)-resonator system in the lab frame, the
//! rotating frame and the effective conditional-displacement picture, together
//! with the frame transformation that connects them.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hilbert::{ladder, number_operator, pauli_on, HilbertLayout, Ket, Operator, PauliAxis};
use crate::numerics::linalg::C64;
use crate::numerics::{jn, MAX_BESSEL_ORDER};
use crate::propagate::Hamiltonian;

/// Modulation index giving g_eff^1 = -g_eff^2 with a nulled flip-flop term.
pub const ALPHA_BALANCED: f64 = 1.20242;
/// Modulation index quoted for the maximal effective coupling.
pub const ALPHA_PEAK: f64 = 1.832;
/// Quoted first zero of J_0; alpha_1 - alpha_2 is tuned to it.
pub const FLIP_FLOP_NULL: f64 = 2.40483;
/// Default Jacobi-Anger truncation |l| <= 20.
pub const DEFAULT_L_MAX: usize = 20;
/// Smallest admitted Jacobi-Anger truncation.
pub const MIN_L_MAX: usize = 8;

/// Ratio treated as "much greater than" by [`validity_report`].
pub const MUCH_GREATER: f64 = 10.0;
/// Ratio treated as "much smaller than" by [`validity_report`].
pub const MUCH_SMALLER: f64 = 0.1;
/// Admitted mismatch | |alpha_1 - alpha_2| - 2.40483 |.
pub const FLIP_FLOP_WINDOW: f64 = 1e-3;

/// Static system parameters in units of omega_r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub omega_q: f64,
    pub omega_r: f64,
    pub g: f64,
    pub d_coupling: f64,
    pub n_qubits: usize,
}

impl SystemParams {
    /// Identical qubits with splitting `omega_q` and coupling `g`; the
    /// qubit-qubit strength is derived as D = g^2 / omega_r.
    pub fn new(n_qubits: usize, omega_q: f64, g: f64) -> Result<Self> {
        if !(1..=2).contains(&n_qubits) {
            return Err(Error::param("n_qubits", format!("must be 1 or 2, got {n_qubits}")));
        }
        if !(omega_q.is_finite() && omega_q > 0.0) {
            return Err(Error::param("omega_q", format!("must be positive, got {omega_q}")));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::param("g", format!("must be non-negative, got {g}")));
        }
        let omega_r = 1.0;
        Ok(Self {
            omega_q,
            omega_r,
            g,
            d_coupling: g * g / omega_r,
            n_qubits,
        })
    }

    pub fn with_d_coupling(mut self, d_coupling: f64) -> Result<Self> {
        if !d_coupling.is_finite() {
            return Err(Error::param("d_coupling", "must be finite"));
        }
        self.d_coupling = d_coupling;
        Ok(self)
    }

    /// eta = omega_q / omega_r.
    pub fn eta(&self) -> f64 {
        self.omega_q / self.omega_r
    }

    pub fn layout(&self, fock_dim: usize) -> Result<HilbertLayout> {
        HilbertLayout::new(self.n_qubits, fock_dim)
    }

    fn check_layout(&self, layout: HilbertLayout) -> Result<()> {
        if layout.n_qubits() != self.n_qubits {
            return Err(Error::InvalidLayout(format!(
                "layout has {} qubit(s) but the system has {}",
                layout.n_qubits(),
                self.n_qubits
            )));
        }
        Ok(())
    }
}

/// Parametric modulation omega_q^m(t) = omega_q + eps_m sin(omega t - phi).
#[derive(Debug, Clone, PartialEq)]
pub struct DriveParams {
    epsilon: Vec<f64>,
    omega_d: f64,
    phi: f64,
    alpha: Vec<f64>,
}

impl DriveParams {
    /// Drive specified through modulation indices alpha_m = eps_m / omega.
    pub fn from_alphas(alphas: &[f64], omega_d: f64, phi: f64) -> Result<Self> {
        Self::check_common(alphas, omega_d, phi)?;
        Ok(Self {
            epsilon: alphas.iter().map(|a| a * omega_d).collect(),
            omega_d,
            phi,
            alpha: alphas.to_vec(),
        })
    }

    pub fn from_epsilons(epsilons: &[f64], omega_d: f64, phi: f64) -> Result<Self> {
        Self::check_common(epsilons, omega_d, phi)?;
        Ok(Self {
            epsilon: epsilons.to_vec(),
            omega_d,
            phi,
            alpha: epsilons.iter().map(|e| e / omega_d).collect(),
        })
    }

    /// The operating point: omega = omega_q and phi = pi/2.
    pub fn resonant(system: &SystemParams, alphas: &[f64]) -> Result<Self> {
        if alphas.len() != system.n_qubits {
            return Err(Error::param(
                "alpha",
                format!("expected {} value(s), got {}", system.n_qubits, alphas.len()),
            ));
        }
        Self::from_alphas(alphas, system.omega_q, FRAC_PI_2)
    }

    /// No modulation, at the resonant operating point.
    pub fn undriven(system: &SystemParams) -> Self {
        Self::resonant(system, &vec![0.0; system.n_qubits]).expect("zero drive is always valid")
    }

    fn check_common(values: &[f64], omega_d: f64, phi: f64) -> Result<()> {
        if !(1..=2).contains(&values.len()) {
            return Err(Error::param("alpha", "one value per qubit (1 or 2) required"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("alpha", "values must be finite"));
        }
        if !(omega_d.is_finite() && omega_d > 0.0) {
            return Err(Error::param("omega_d", format!("must be positive, got {omega_d}")));
        }
        if !phi.is_finite() {
            return Err(Error::param("phi", "must be finite"));
        }
        Ok(())
    }

    pub fn epsilon(&self) -> &[f64] {
        &self.epsilon
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn omega_d(&self) -> f64 {
        self.omega_d
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn n_qubits(&self) -> usize {
        self.alpha.len()
    }

    /// Same drive with every amplitude negated, i.e. the phase advanced by pi.
    pub fn reversed(&self) -> Self {
        Self {
            epsilon: self.epsilon.iter().map(|e| -e).collect(),
            omega_d: self.omega_d,
            phi: self.phi,
            alpha: self.alpha.iter().map(|a| -a).collect(),
        }
    }

    /// Whether alpha_1 - alpha_2 sits at the quoted zero of J_0.
    pub fn flip_flop_nulled(&self) -> bool {
        match self.alpha.as_slice() {
            [a1, a2] => ((a1 - a2).abs() - FLIP_FLOP_NULL).abs() <= FLIP_FLOP_WINDOW,
            _ => true,
        }
    }

    fn max_abs_epsilon(&self) -> f64 {
        self.epsilon.iter().fold(0.0, |m, e| m.max(e.abs()))
    }
}

fn check_compatible(p: &SystemParams, d: &DriveParams, layout: HilbertLayout) -> Result<()> {
    p.check_layout(layout)?;
    if d.n_qubits() != p.n_qubits {
        return Err(Error::param(
            "alpha",
            format!("drive has {} qubit(s) but the system has {}", d.n_qubits(), p.n_qubits),
        ));
    }
    Ok(())
}

/// Time dependence of the drive amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DriveSchedule {
    #[default]
    Continuous,
    /// The drive amplitude changes sign every `period` (a pi phase jump),
    /// so each segment reproduces the first one in the rotating frame.
    AlternatingEvery(f64),
}

impl DriveSchedule {
    pub fn sign(&self, t: f64) -> f64 {
        match *self {
            DriveSchedule::Continuous => 1.0,
            DriveSchedule::AlternatingEvery(period) => {
                // half-open segments [k T, (k + 1) T)
                let k = (t / period + 1e-12).floor() as i64;
                if k.rem_euclid(2) == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

struct Ingredients {
    sz: Vec<Operator>,
    sx: Vec<Operator>,
    sp: Vec<Operator>,
    sm: Vec<Operator>,
    a: Operator,
    a_dag: Operator,
}

impl Ingredients {
    fn new(layout: HilbertLayout) -> Result<Self> {
        let each = |axis| {
            (0..layout.n_qubits())
                .map(|m| pauli_on(m, axis, layout))
                .collect::<Result<Vec<_>>>()
        };
        let (a, a_dag) = ladder(layout);
        Ok(Self {
            sz: each(PauliAxis::Z)?,
            sx: each(PauliAxis::X)?,
            sp: each(PauliAxis::Plus)?,
            sm: each(PauliAxis::Minus)?,
            a,
            a_dag,
        })
    }
}

/// Static part shared by the lab-frame Hamiltonians.
fn lab_static(p: &SystemParams, layout: HilbertLayout, ops: &Ingredients) -> Operator {
    let mut h = number_operator(layout).scaled(C64::from(p.omega_r));
    let field = &ops.a + &ops.a_dag;
    for m in 0..p.n_qubits {
        h = &h + &ops.sz[m].scaled(C64::from(0.5 * p.omega_q));
        h = &h + &(&field * &ops.sx[m]).scaled(C64::from(p.g));
    }
    if p.n_qubits == 2 {
        // sum over m != n counts the pair twice
        h = &h + &(&ops.sx[0] * &ops.sx[1]).scaled(C64::from(2.0 * p.d_coupling));
    }
    h
}

/// Undriven lab-frame Hamiltonian.
pub fn lab_hamiltonian(p: &SystemParams, layout: HilbertLayout) -> Result<Operator> {
    p.check_layout(layout)?;
    Ok(lab_static(p, layout, &Ingredients::new(layout)?))
}

/// Lab-frame Hamiltonian with the modulated qubit splittings, as a
/// time-dependent provider.
pub fn driven_terms(
    p: &SystemParams,
    d: &DriveParams,
    layout: HilbertLayout,
    schedule: DriveSchedule,
) -> Result<Hamiltonian> {
    check_compatible(p, d, layout)?;
    let ops = Ingredients::new(layout)?;
    let omega_max = (p.omega_q + d.max_abs_epsilon()).max(p.omega_r);
    let mut h = Hamiltonian::new(layout, omega_max);
    h.add_static(&lab_static(p, layout, &ops));
    for m in 0..p.n_qubits {
        let (eps, omega, phi) = (d.epsilon[m], d.omega_d, d.phi);
        if eps == 0.0 {
            continue;
        }
        h.add_term(&ops.sz[m], move |t| {
            C64::from(0.5 * schedule.sign(t) * eps * (omega * t - phi).sin())
        });
    }
    Ok(h)
}

/// Driven lab-frame Hamiltonian at time `t`.
pub fn driven_hamiltonian(
    p: &SystemParams,
    d: &DriveParams,
    t: f64,
    layout: HilbertLayout,
) -> Result<Operator> {
    Ok(driven_terms(p, d, layout, DriveSchedule::Continuous)?.matrix(t))
}

/// Diagonal of the frame unitary U(t) = U_1(t) U_2(t).
pub fn frame_phases(t: f64, p: &SystemParams, d: &DriveParams, layout: HilbertLayout) -> Vec<C64> {
    let modulation = (d.omega_d * t - d.phi).cos();
    (0..layout.dim())
        .map(|k| {
            let (q, n) = layout.split(k);
            let mut phase = -p.omega_r * n as f64 * t;
            for m in 0..layout.n_qubits() {
                let s = layout.sz_eigenvalue(q, m);
                phase += -0.5 * p.omega_q * s * t + 0.5 * d.alpha[m] * modulation * s;
            }
            C64::from_polar(1.0, phase)
        })
        .collect()
}

/// Rotating-frame transformation U(t) = U_1(t) U_2(t), with
/// U_1 = exp[-i (sum_m omega_q/2 sigma_z^m + omega_r a^dag a) t] and
/// U_2 = exp[i sum_m alpha_m/2 cos(omega t - phi) sigma_z^m].
pub fn frame_transform(
    t: f64,
    p: &SystemParams,
    d: &DriveParams,
    layout: HilbertLayout,
) -> Result<Operator> {
    check_compatible(p, d, layout)?;
    Operator::diagonal(layout, &frame_phases(t, p, d, layout))
}

/// Maps a lab-frame state at time `t` into the rotating frame, U^dag(t) psi.
pub fn to_rotating_frame(psi: &Ket, t: f64, p: &SystemParams, d: &DriveParams) -> Result<Ket> {
    let layout = psi.layout();
    check_compatible(p, d, layout)?;
    let phases = frame_phases(t, p, d, layout);
    let amps = psi
        .amplitudes()
        .iter()
        .zip(phases)
        .map(|(a, u)| u.conj() * a)
        .collect();
    Ket::new(layout, amps)
}

/// sum_{|l| <= l_max} J_l(x) e^{i s l (theta + pi/2)}, which is the truncated
/// Jacobi-Anger series of exp(i s x cos theta).
fn jacobi_anger(bessel: &[f64], l_max: i32, sign: f64, theta: f64) -> C64 {
    let step = C64::from_polar(1.0, sign * (theta + FRAC_PI_2));
    let step_inv = step.conj();
    let mut up = C64::new(1.0, 0.0);
    let mut down = C64::new(1.0, 0.0);
    let mut sum = C64::from(bessel[l_max as usize]);
    for l in 1..=l_max as usize {
        up *= step;
        down *= step_inv;
        sum += up * bessel[l_max as usize + l] + down * bessel[l_max as usize - l];
    }
    sum
}

fn bessel_table(x: f64, l_max: i32) -> Vec<f64> {
    (-l_max..=l_max).map(|l| jn(l, x)).collect()
}

/// Rotating-frame Hamiltonian with every phase factor exp(+-i alpha cos)
/// expanded in Bessel sidebands |l| <= l_max.
pub fn rotating_frame_terms(
    p: &SystemParams,
    d: &DriveParams,
    layout: HilbertLayout,
    l_max: usize,
) -> Result<Hamiltonian> {
    check_compatible(p, d, layout)?;
    if !(MIN_L_MAX..=MAX_BESSEL_ORDER as usize).contains(&l_max) {
        return Err(Error::param(
            "l_max",
            format!("must lie in [{MIN_L_MAX}, {MAX_BESSEL_ORDER}], got {l_max}"),
        ));
    }
    let l_max = l_max as i32;
    let ops = Ingredients::new(layout)?;
    let (g, omega, phi, omega_q) = (p.g, d.omega_d, d.phi, p.omega_q);
    let delta_minus = p.omega_r - p.omega_q;
    let delta_plus = p.omega_r + p.omega_q;

    let eps_sum: f64 = d.epsilon.iter().map(|e| e.abs()).sum();
    let omega_max = (p.omega_r + p.omega_q + d.max_abs_epsilon())
        .max(if p.n_qubits == 2 { 2.0 * p.omega_q + eps_sum } else { 0.0 });
    let mut h = Hamiltonian::new(layout, omega_max);

    for m in 0..p.n_qubits {
        let table: Arc<[f64]> = bessel_table(d.alpha[m], l_max).into();
        let op = &ops.a_dag * &ops.sm[m];
        let tb = table.clone();
        h.add_with_adjoint(&op, move |t| {
            g * C64::from_polar(1.0, delta_minus * t) * jacobi_anger(&tb, l_max, 1.0, omega * t - phi)
        });
        let op = &ops.a_dag * &ops.sp[m];
        h.add_with_adjoint(&op, move |t| {
            g * C64::from_polar(1.0, delta_plus * t) * jacobi_anger(&table, l_max, -1.0, omega * t - phi)
        });
    }

    if p.n_qubits == 2 {
        let dc = p.d_coupling;
        for (m, n) in [(0usize, 1usize), (1, 0)] {
            let sum_table: Arc<[f64]> = bessel_table(d.alpha[m] + d.alpha[n], l_max).into();
            let op = &ops.sp[m] * &ops.sp[n];
            h.add_with_adjoint(&op, move |t| {
                dc * C64::from_polar(1.0, 2.0 * omega_q * t)
                    * jacobi_anger(&sum_table, l_max, -1.0, omega * t - phi)
            });
            let diff_table: Arc<[f64]> = bessel_table(d.alpha[m] - d.alpha[n], l_max).into();
            let op = &ops.sp[m] * &ops.sm[n];
            h.add_with_adjoint(&op, move |t| {
                dc * jacobi_anger(&diff_table, l_max, -1.0, omega * t - phi)
            });
        }
    }
    Ok(h)
}

/// Rotating-frame Hamiltonian at time `t` (Jacobi-Anger form).
pub fn rotating_frame_hamiltonian(
    p: &SystemParams,
    d: &DriveParams,
    t: f64,
    layout: HilbertLayout,
    l_max: usize,
) -> Result<Operator> {
    Ok(rotating_frame_terms(p, d, layout, l_max)?.matrix(t))
}

/// Effective couplings g_eff^m = g J_1(alpha_m).
pub fn effective_couplings(p: &SystemParams, d: &DriveParams) -> Vec<f64> {
    d.alpha.iter().map(|&a| p.g * jn(1, a)).collect()
}

fn check_phase(d: &DriveParams) -> Result<()> {
    if (d.phi - FRAC_PI_2).abs() > 1e-12 {
        return Err(Error::PhaseConvention { phi: d.phi });
    }
    Ok(())
}

/// Effective conditional-displacement Hamiltonian
/// sum_m g_eff^m (a^dag e^{i omega_r t} + a e^{-i omega_r t}) sigma_x^m.
pub fn effective_terms(p: &SystemParams, d: &DriveParams, layout: HilbertLayout) -> Result<Hamiltonian> {
    check_compatible(p, d, layout)?;
    check_phase(d)?;
    let ops = Ingredients::new(layout)?;
    let omega_r = p.omega_r;
    let mut h = Hamiltonian::new(layout, omega_r);
    for (m, g_eff) in effective_couplings(p, d).into_iter().enumerate() {
        let op = &ops.a_dag * &ops.sx[m];
        h.add_with_adjoint(&op, move |t| g_eff * C64::from_polar(1.0, omega_r * t));
    }
    Ok(h)
}

pub fn effective_hamiltonian(
    p: &SystemParams,
    d: &DriveParams,
    t: f64,
    layout: HilbertLayout,
) -> Result<Operator> {
    Ok(effective_terms(p, d, layout)?.matrix(t))
}

/// One neglect condition behind the effective Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityCondition {
    pub name: &'static str,
    pub satisfied: bool,
    /// The quantity actually compared against the threshold.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub eta: f64,
    pub conditions: Vec<ValidityCondition>,
}

impl ValidityReport {
    pub fn all_satisfied(&self) -> bool {
        self.conditions.iter().all(|c| c.satisfied)
    }

    pub fn condition(&self, name: &str) -> Option<&ValidityCondition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn violations(&self) -> impl Iterator<Item = &ValidityCondition> {
        self.conditions.iter().filter(|c| !c.satisfied)
    }
}

pub mod condition {
    pub const ETA_ABOVE_TWO: &str = "eta > 2";
    pub const RESONANT_DRIVE: &str = "omega_q = omega";
    pub const PHASE: &str = "phi = pi/2";
    pub const DELTA_MINUS: &str = "|delta_-| >> g|J_0(alpha_m)|";
    pub const SIDEBAND: &str = "|omega_r - 2 omega_q| >> g|J_-1(alpha_m)|";
    pub const FLIP_FLOP: &str = "J_0(alpha_1 - alpha_2) = 0";
    pub const PAIR_CREATION: &str = "D|J_2(alpha_1 + alpha_2)| << g";
}

/// Ratio `num / den`, infinite when the denominator vanishes.
fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Evaluates every condition under which the effective Hamiltonian follows
/// from the rotating-frame one.
pub fn validity_report(p: &SystemParams, d: &DriveParams) -> ValidityReport {
    let eta = p.eta();
    let mut conditions = vec![
        ValidityCondition {
            name: condition::ETA_ABOVE_TWO,
            satisfied: eta > 2.0,
            margin: eta / 2.0,
        },
        {
            let mismatch = (p.omega_q - d.omega_d).abs();
            ValidityCondition {
                name: condition::RESONANT_DRIVE,
                satisfied: mismatch <= 1e-9,
                margin: mismatch,
            }
        },
        {
            let mismatch = (d.phi - FRAC_PI_2).abs();
            ValidityCondition {
                name: condition::PHASE,
                satisfied: mismatch <= 1e-12,
                margin: mismatch,
            }
        },
    ];

    let delta_minus = (p.omega_r - p.omega_q).abs();
    let sideband = (p.omega_r - 2.0 * p.omega_q).abs();
    let dm = d
        .alpha
        .iter()
        .map(|&a| ratio(delta_minus, p.g * jn(0, a).abs()))
        .fold(f64::INFINITY, f64::min);
    let sb = d
        .alpha
        .iter()
        .map(|&a| ratio(sideband, p.g * jn(-1, a).abs()))
        .fold(f64::INFINITY, f64::min);
    conditions.push(ValidityCondition {
        name: condition::DELTA_MINUS,
        satisfied: dm >= MUCH_GREATER,
        margin: dm,
    });
    conditions.push(ValidityCondition {
        name: condition::SIDEBAND,
        satisfied: sb >= MUCH_GREATER,
        margin: sb,
    });

    if let [a1, a2] = d.alpha.as_slice() {
        conditions.push(ValidityCondition {
            name: condition::FLIP_FLOP,
            satisfied: d.flip_flop_nulled(),
            margin: jn(0, a1 - a2).abs(),
        });
        let pair = ratio(p.d_coupling.abs() * jn(2, a1 + a2).abs(), p.g);
        let pair = if pair.is_nan() { 0.0 } else { pair };
        conditions.push(ValidityCondition {
            name: condition::PAIR_CREATION,
            satisfied: pair <= MUCH_SMALLER,
            margin: pair,
        });
    }
    ValidityReport { eta, conditions }
}

/// One resonator period 2 pi / omega_r.
pub fn resonator_period(p: &SystemParams) -> f64 {
    TAU / p.omega_r
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn layout(q: usize) -> HilbertLayout {
        HilbertLayout::new(q, 16).unwrap()
    }

    #[test]
    fn d_coupling_derivation_and_override() {
        let p = SystemParams::new(2, 3.0, 0.2).unwrap();
        assert!((p.d_coupling - 0.04).abs() < 1e-12);
        assert_eq!(p.with_d_coupling(0.1).unwrap().d_coupling, 0.1);
        assert!(SystemParams::new(2, 3.0, -0.1).is_err());
        assert!(SystemParams::new(2, 0.0, 0.1).is_err());
    }

    #[test]
    fn alpha_relation() {
        let d = DriveParams::from_epsilons(&[3.0, -1.5], 3.0, FRAC_PI_2).unwrap();
        assert!((d.alpha()[0] - 1.0).abs() < 1e-12);
        assert!((d.alpha()[1] + 0.5).abs() < 1e-12);
        let d = DriveParams::from_alphas(&[ALPHA_BALANCED, -ALPHA_BALANCED], 3.0, FRAC_PI_2).unwrap();
        assert!(d.flip_flop_nulled());
        assert!(!DriveParams::from_alphas(&[1.0, -1.0], 3.0, FRAC_PI_2)
            .unwrap()
            .flip_flop_nulled());
    }

    #[test]
    fn two_qubit_ground_diagonal_element() {
        let p = SystemParams::new(2, 3.0, 0.2).unwrap();
        let h = lab_hamiltonian(&p, layout(2)).unwrap();
        let gg = 3;
        assert!((h.element((gg, 0), (gg, 0)) - C64::from(-3.0)).norm() < 1e-14);
        assert_eq!(h.hermiticity_defect(), 0.0);
    }

    #[test]
    fn undriven_equals_lab() {
        let p = SystemParams::new(2, 3.0, 0.2).unwrap();
        let d = DriveParams::undriven(&p);
        let lab = lab_hamiltonian(&p, layout(2)).unwrap();
        for t in [0.0, 0.4, 2.3] {
            let h = driven_hamiltonian(&p, &d, t, layout(2)).unwrap();
            assert!(h.max_abs_diff(&lab) < 1e-15);
        }
    }

    #[test]
    fn peak_modulation_shifts_sigma_z() {
        let p = SystemParams::new(1, 3.0, 0.0).unwrap();
        let d = DriveParams::from_epsilons(&[0.6], 3.0, FRAC_PI_2).unwrap();
        // omega t - phi = pi/2
        let t = PI / 3.0;
        let h = driven_hamiltonian(&p, &d, t, layout(1)).unwrap();
        let (e, g) = (0usize, 1usize);
        assert!((h.element((e, 0), (e, 0)).re - 1.8).abs() < 1e-12);
        assert!((h.element((g, 0), (g, 0)).re + 1.8).abs() < 1e-12);
    }

    #[test]
    fn drive_periodicity() {
        let p = SystemParams::new(2, 3.0, 0.2).unwrap();
        let d = DriveParams::resonant(&p, &[1.0, -1.0]).unwrap();
        let t = 0.731;
        let h0 = driven_hamiltonian(&p, &d, t, layout(2)).unwrap();
        let h1 = driven_hamiltonian(&p, &d, t + TAU / 3.0, layout(2)).unwrap();
        assert!(h0.max_abs_diff(&h1) < 1e-12);
    }

    #[test]
    fn frame_is_identity_at_zero() {
        let p = SystemParams::new(2, 3.5, 0.2).unwrap();
        let d = DriveParams::resonant(&p, &[ALPHA_BALANCED, -ALPHA_BALANCED]).unwrap();
        let u = frame_transform(0.0, &p, &d, layout(2)).unwrap();
        assert!(u.max_abs_diff(&Operator::identity(layout(2))) < 1e-15);
    }

    #[test]
    fn undriven_rotating_frame_is_bare_rabi_coupling() {
        let p = SystemParams::new(1, 3.0, 0.2).unwrap();
        let d = DriveParams::undriven(&p);
        let l = layout(1);
        let (_, a_dag) = ladder(l);
        let sp = pauli_on(0, PauliAxis::Plus, l).unwrap();
        let sm = pauli_on(0, PauliAxis::Minus, l).unwrap();
        for t in [0.0, 0.3, 1.7] {
            let h = rotating_frame_hamiltonian(&p, &d, t, l, DEFAULT_L_MAX).unwrap();
            let rot = (&a_dag * &sm).scaled(C64::from_polar(0.2, -2.0 * t));
            let counter = (&a_dag * &sp).scaled(C64::from_polar(0.2, 4.0 * t));
            let expected = &(&rot + &rot.dagger()) + &(&counter + &counter.dagger());
            assert!(h.max_abs_diff(&expected) < 1e-14);
        }
    }

    #[test]
    fn effective_requires_quadrature_phase() {
        let p = SystemParams::new(1, 3.0, 0.2).unwrap();
        let d = DriveParams::from_alphas(&[ALPHA_PEAK], 3.0, 0.3).unwrap();
        assert!(matches!(
            effective_hamiltonian(&p, &d, 0.0, layout(1)),
            Err(Error::PhaseConvention { .. })
        ));
    }

    #[test]
    fn effective_couplings_quoted() {
        let p = SystemParams::new(2, 3.0, 1.0).unwrap();
        let d = DriveParams::resonant(&p, &[ALPHA_BALANCED, -ALPHA_BALANCED]).unwrap();
        let c = effective_couplings(&p, &d);
        assert!((c[0] - 0.499).abs() < 5e-4);
        assert_eq!(c[0], -c[1]);
        let p1 = SystemParams::new(1, 3.0, 1.0).unwrap();
        let d1 = DriveParams::resonant(&p1, &[ALPHA_PEAK]).unwrap();
        assert!((effective_couplings(&p1, &d1)[0] - 0.582).abs() < 5e-4);
    }

    #[test]
    fn effective_at_time_zero() {
        let p = SystemParams::new(2, 3.0, 0.2).unwrap();
        let d = DriveParams::resonant(&p, &[ALPHA_BALANCED, -ALPHA_BALANCED]).unwrap();
        let l = layout(2);
        let h = effective_hamiltonian(&p, &d, 0.0, l).unwrap();
        let (a, a_dag) = ladder(l);
        let field = &a + &a_dag;
        let c = effective_couplings(&p, &d);
        let mut expected = Operator::zeros(l);
        for (m, &cm) in c.iter().enumerate() {
            let sx = pauli_on(m, PauliAxis::X, l).unwrap();
            expected = &expected + &(&field * &sx).scaled(C64::from(cm));
        }
        assert!(h.max_abs_diff(&expected) < 1e-14);
        assert_eq!(h.hermiticity_defect(), 0.0);
    }

    #[test]
    fn flip_flop_coefficient_vanishes() {
        let p = SystemParams::new(2, 3.0, 0.2).unwrap();
        let coefficient = p.d_coupling * jn(0, 2.0 * ALPHA_BALANCED);
        assert!(coefficient.abs() <= 1e-5 * p.d_coupling);
    }

    #[test]
    fn validity_examples() {
        let p = SystemParams::new(2, 3.0, 0.2).unwrap();
        let d = DriveParams::resonant(&p, &[ALPHA_BALANCED, -ALPHA_BALANCED]).unwrap();
        let report = validity_report(&p, &d);
        assert!(report.all_satisfied(), "{report:?}");
        let dm = report.condition(condition::DELTA_MINUS).unwrap().margin;
        assert!((dm - 14.9).abs() < 0.05, "{dm}");

        let p = SystemParams::new(2, 1.5, 0.2).unwrap();
        let d = DriveParams::resonant(&p, &[ALPHA_BALANCED, -ALPHA_BALANCED]).unwrap();
        assert!(!validity_report(&p, &d).condition(condition::ETA_ABOVE_TWO).unwrap().satisfied);

        let p = SystemParams::new(2, 3.0, 0.2).unwrap();
        let report = validity_report(&p, &DriveParams::undriven(&p));
        let ff = report.condition(condition::FLIP_FLOP).unwrap();
        assert!(!ff.satisfied);
        assert_eq!(ff.margin, 1.0);
    }

    #[test]
    fn alternating_schedule() {
        let s = DriveSchedule::AlternatingEvery(PI);
        assert_eq!(s.sign(0.5), 1.0);
        assert_eq!(s.sign(PI + 0.1), -1.0);
        assert_eq!(s.sign(2.0 * PI + 0.1), 1.0);
        assert_eq!(DriveSchedule::Continuous.sign(10.0), 1.0);
    }
}
