//! Schrodinger-cat generation with a single conditionally displaced qubit.

use std::f64::consts::PI;

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::gate::{analytic_unitary, beta_phi};
use crate::hilbert::{coherent_amplitudes, ladder, pauli_on, HilbertLayout, Ket, Level, PauliAxis};
use crate::model::{self, DriveParams, DriveSchedule, SystemParams};
use crate::numerics::linalg::{CVector, C64};
use crate::propagate::{evolve_to, EvolutionConfig};

const EXCITED: usize = 0;
const GROUND: usize = 1;

fn require_single_qubit(layout: HilbertLayout) -> Result<()> {
    if layout.n_qubits() != 1 {
        return Err(Error::InvalidLayout(format!(
            "cat states need a single qubit, got {}",
            layout.n_qubits()
        )));
    }
    Ok(())
}

/// Half a resonator period, t_0 = pi / omega_r.
pub fn half_period(p: &SystemParams) -> f64 {
    PI / p.omega_r
}

/// (|+> |beta> - |-> |-beta>) / sqrt(2) without the dynamical phase.
pub fn cat_with_amplitude(beta: C64, layout: HilbertLayout) -> Result<Ket> {
    require_single_qubit(layout)?;
    layout.check_displacement(beta.norm())?;
    let plus = coherent_amplitudes(beta, layout.fock_dim());
    let minus = coherent_amplitudes(-beta, layout.fock_dim());
    // |+> = (|e> + |g>)/sqrt2, |-> = (|e> - |g>)/sqrt2
    let amps = Array1::from_shape_fn(layout.dim(), |k| {
        let (q, n) = layout.split(k);
        match q {
            EXCITED => 0.5 * (plus[n] - minus[n]),
            _ => 0.5 * (plus[n] + minus[n]),
        }
    });
    Ket::new(layout, amps)
}

/// e^{i Phi(t)} / sqrt(2) (|+> |beta(t)> - |-> |-beta(t)>), the state reached
/// from |g, 0_c> under the effective single-qubit Hamiltonian.
pub fn cat_state(g_eff_ratio: f64, t: f64, layout: HilbertLayout) -> Result<Ket> {
    let (beta, phase) = beta_phi(g_eff_ratio, t);
    Ok(cat_with_amplitude(beta, layout)?.scaled(C64::from_polar(1.0, phase)))
}

/// Amplitude of the cat state closest to `psi`: the direction comes from
/// <sigma_x a>, the magnitude from a golden-section search on the overlap.
/// Returns the amplitude and the fidelity it reaches.
pub fn fit_cat_amplitude(psi: &Ket) -> Result<(C64, f64)> {
    let layout = psi.layout();
    let estimate = decompose_cat(psi)?.beta;
    let direction = if estimate.norm() > 0.0 {
        estimate / estimate.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let overlap = |r: f64| -> Result<f64> {
        crate::hilbert::fidelity(&cat_with_amplitude(direction * r, layout)?, psi)
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, layout.max_displacement_sq().sqrt().min(2.0 * estimate.norm() + 0.5));
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (overlap(x1)?, overlap(x2)?);
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = overlap(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = overlap(x1)?;
        }
    }
    let r = 0.5 * (lo + hi);
    Ok((direction * r, overlap(r)?))
}

/// Measurement statistics and conditional resonator states of a
/// single-qubit cat state.
#[derive(Debug, Clone, PartialEq)]
pub struct CatDecomposition {
    /// Branch amplitude, estimated as <sigma_x a>.
    pub beta: C64,
    /// N_0 = [2 (1 + e^{-2|beta|^2})]^{-1/2}.
    pub norm_even: f64,
    /// N_1 = [2 (1 - e^{-2|beta|^2})]^{-1/2}; infinite at beta = 0.
    pub norm_odd: f64,
    pub p_even: f64,
    pub p_odd: f64,
    /// Resonator state conditioned on measuring |g>.
    pub even_state: CVector,
    /// Resonator state conditioned on measuring |e>; `None` when that
    /// branch has vanishing probability.
    pub odd_state: Option<CVector>,
}

/// Probability below which a measurement branch is treated as empty.
pub const DEGENERATE_BRANCH: f64 = 1e-14;

pub fn decompose_cat(psi: &Ket) -> Result<CatDecomposition> {
    let layout = psi.layout();
    require_single_qubit(layout)?;
    let total = psi.norm().powi(2);
    if total == 0.0 {
        return Err(Error::param("psi", "zero state"));
    }

    let (a, _) = ladder(layout);
    let sx = pauli_on(0, PauliAxis::X, layout)?;
    let beta = psi.inner(&(&sx * &a).apply(psi)?)? / total;

    let even = psi.resonator_branch(GROUND);
    let odd = psi.resonator_branch(EXCITED);
    let weight = |v: &CVector| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let (w_even, w_odd) = (weight(&even), weight(&odd));
    let p_even = w_even / (w_even + w_odd);
    let p_odd = w_odd / (w_even + w_odd);

    let overlap = (-2.0 * beta.norm_sqr()).exp();
    let norm_even = (2.0 * (1.0 + overlap)).powf(-0.5);
    let norm_odd = (2.0 * (1.0 - overlap)).powf(-0.5);

    let even_state = even / C64::from(w_even.sqrt());
    let odd_state = (p_odd > DEGENERATE_BRANCH).then(|| odd / C64::from(w_odd.sqrt()));
    Ok(CatDecomposition {
        beta,
        norm_even,
        norm_odd,
        p_even,
        p_odd,
        even_state,
        odd_state,
    })
}

impl CatDecomposition {
    /// Rows `(n, |<n|even>|^2 p_even, |<n|odd>|^2 p_odd)`: the joint
    /// photon-number distribution of each measurement branch.
    pub fn fock_distribution(&self) -> Vec<(usize, f64, f64)> {
        (0..self.even_state.len())
            .map(|n| {
                let even = self.even_state[n].norm_sqr() * self.p_even;
                let odd = self
                    .odd_state
                    .as_ref()
                    .map_or(0.0, |s| s[n].norm_sqr() * self.p_odd);
                (n, even, odd)
            })
            .collect()
    }

    /// Weight of the even branch on odd photon numbers plus the weight of
    /// the odd branch on even photon numbers.
    pub fn parity_leakage(&self) -> f64 {
        let wrong = |v: &CVector, parity: usize| {
            v.iter()
                .enumerate()
                .filter(|(n, _)| n % 2 == parity)
                .map(|(_, z)| z.norm_sqr())
                .sum::<f64>()
        };
        wrong(&self.even_state, 1) + self.odd_state.as_ref().map_or(0.0, |s| wrong(s, 0))
    }
}

/// Ideal state after `steps` applications of the half-period evolution to
/// |g, 0_c>; the branch amplitude grows as 2 k g_eff / omega_r.
pub fn multi_step_cat(g_eff_ratio: f64, steps: usize, layout: HilbertLayout) -> Result<Ket> {
    require_single_qubit(layout)?;
    if steps == 0 {
        return Err(Error::param("steps", "must be at least 1"));
    }
    layout.check_displacement(2.0 * steps as f64 * g_eff_ratio.abs())?;
    let step = analytic_unitary(g_eff_ratio, PI, layout)?;
    let mut psi = Ket::basis(layout, &[Level::Ground], 0)?;
    for _ in 0..steps {
        psi = step.apply(&psi)?;
    }
    Ok(psi)
}

/// Outcome of [`cat_fidelity_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct CatReport {
    pub steps: usize,
    pub fidelity: f64,
    /// Ideal branch amplitude 2 k g_eff / omega_r.
    pub ideal_amplitude: f64,
    pub ideal: CatDecomposition,
    pub numerical: CatDecomposition,
    /// Amplitude of the cat state closest to the simulated one, and the
    /// fidelity it reaches.
    pub fitted_amplitude: C64,
    pub fitted_fidelity: f64,
}

/// Evolves |g, 0_c> for `steps` half periods under the driven lab
/// Hamiltonian and compares it, in the rotating frame, with the ideal
/// multi-step cat state.
///
/// Consecutive half periods use drive amplitudes of alternating sign (a pi
/// jump of the drive phase); with a continuous drive the effective evolution
/// over a full period returns the resonator to the vacuum instead of doubling
/// the displacement.
pub fn cat_fidelity_experiment(
    p: &SystemParams,
    d: &DriveParams,
    steps: usize,
    fock_dim: usize,
    cfg: &EvolutionConfig,
) -> Result<CatReport> {
    let layout = p.layout(fock_dim)?;
    require_single_qubit(layout)?;
    if steps == 0 {
        return Err(Error::param("steps", "must be at least 1"));
    }
    let g_eff_ratio = model::effective_couplings(p, d)[0] / p.omega_r;
    let ideal = multi_step_cat(g_eff_ratio, steps, layout)?;

    let t0 = half_period(p);
    let t_end = steps as f64 * t0;
    let h = model::driven_terms(p, d, layout, DriveSchedule::AlternatingEvery(t0))?;
    let lab = evolve_to(&h, &Ket::basis(layout, &[Level::Ground], 0)?, t_end, cfg)?;
    let last_segment = if steps.is_multiple_of(2) { d.reversed() } else { d.clone() };
    let rotated = model::to_rotating_frame(&lab, t_end, p, &last_segment)?;

    let (fitted_amplitude, fitted_fidelity) = fit_cat_amplitude(&rotated)?;
    Ok(CatReport {
        steps,
        fitted_amplitude,
        fitted_fidelity,
        fidelity: crate::hilbert::fidelity(&ideal, &rotated)?,
        ideal_amplitude: 2.0 * steps as f64 * g_eff_ratio,
        ideal: decompose_cat(&ideal)?,
        numerical: decompose_cat(&rotated)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{coherent, fidelity};

    fn layout() -> HilbertLayout {
        HilbertLayout::new(1, 32).unwrap()
    }

    #[test]
    fn starts_in_ground_vacuum() {
        let psi = cat_state(0.1164, 0.0, layout()).unwrap();
        let g0 = Ket::basis(layout(), &[Level::Ground], 0).unwrap();
        assert!((fidelity(&psi, &g0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn matches_operator_route() {
        for t in [0.3, 1.0, PI, 4.2] {
            let psi = cat_state(0.1164, t, layout()).unwrap();
            let u = analytic_unitary(0.1164, t, layout()).unwrap();
            let direct = u.apply(&Ket::basis(layout(), &[Level::Ground], 0).unwrap()).unwrap();
            assert!(psi.distance(&direct).unwrap() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn half_period_branches() {
        let psi = cat_state(0.1164, PI, layout()).unwrap();
        let dec = decompose_cat(&psi).unwrap();
        assert!((dec.beta - C64::from(0.2328)).norm() < 1e-9);
        assert!((dec.beta.re - 0.233).abs() < 1e-3);
    }

    #[test]
    fn reduced_purity() {
        for t in [0.5, PI, 2.0] {
            let psi = cat_state(0.2, t, layout()).unwrap();
            let (beta, _) = beta_phi(0.2, t);
            let rho = psi.reduced_qubit_density();
            let purity = rho.dot(&rho).diag().sum().re;
            let expected = 0.5 * (1.0 + (-4.0 * beta.norm_sqr()).exp());
            assert!((purity - expected).abs() < 1e-8);
        }
    }

    #[test]
    fn vacuum_is_even_cat() {
        let dec = decompose_cat(&Ket::basis(layout(), &[Level::Ground], 0).unwrap()).unwrap();
        assert_eq!(dec.p_even, 1.0);
        assert_eq!(dec.p_odd, 0.0);
        assert!(dec.odd_state.is_none());
        assert!((dec.even_state[0] - C64::from(1.0)).norm() < 1e-15);
    }

    #[test]
    fn probabilities_and_normalisations() {
        let psi = cat_state(0.1165, PI, layout()).unwrap();
        let dec = decompose_cat(&psi).unwrap();
        let b2 = dec.beta.norm_sqr();
        assert!((dec.p_even + dec.p_odd - 1.0).abs() < 1e-10);
        assert!((dec.p_even - 0.5 * (1.0 + (-2.0 * b2).exp())).abs() < 1e-10);
        assert!((dec.norm_even - (2.0 * (1.0 + (-2.0 * b2).exp())).powf(-0.5)).abs() < 1e-10);
        assert!((dec.norm_odd - (2.0 * (1.0 - (-2.0 * b2).exp())).powf(-0.5)).abs() < 1e-10);

        // conditional states are N_l (|beta> +- |-beta>)
        let fock = layout().fock_dim();
        let plus = coherent_amplitudes(dec.beta, fock);
        let minus = coherent_amplitudes(-dec.beta, fock);
        let even = (&plus + &minus) * C64::from(dec.norm_even);
        let odd = (&plus - &minus) * C64::from(dec.norm_odd);
        let phase_free = |a: &CVector, b: &CVector| {
            let ov: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
            1.0 - ov.norm()
        };
        assert!(phase_free(&dec.even_state, &even) < 1e-6);
        assert!(phase_free(dec.odd_state.as_ref().unwrap(), &odd) < 1e-6);
        assert!(dec.parity_leakage() < 1e-8);
        let cross: C64 = dec
            .even_state
            .iter()
            .zip(dec.odd_state.as_ref().unwrap().iter())
            .map(|(x, y)| x.conj() * y)
            .sum();
        assert!(cross.norm() < 1e-8);
    }

    #[test]
    fn quoted_even_probability() {
        let beta: f64 = 0.233;
        let p_even = 0.5 * (1.0 + (-2.0 * beta * beta).exp());
        assert!((p_even - 0.948554).abs() < 1e-6);
    }

    #[test]
    fn multi_step_amplitudes() {
        let one = multi_step_cat(0.1164, 1, layout()).unwrap();
        let direct = cat_state(0.1164, PI, layout()).unwrap();
        assert!(one.distance(&direct).unwrap() < 1e-12);
        for k in 1..=4 {
            let dec = decompose_cat(&multi_step_cat(0.1164, k, layout()).unwrap()).unwrap();
            assert!((dec.beta.re - k as f64 * 0.2328).abs() < 1e-9);
            assert!(dec.beta.im.abs() < 1e-9);
        }
        assert!(multi_step_cat(0.1164, 0, layout()).is_err());
        assert!(multi_step_cat(0.5, 4, layout()).is_err());
    }

    #[test]
    fn fit_recovers_known_amplitude() {
        let beta = C64::new(0.3, 0.1);
        let psi = cat_with_amplitude(beta, layout()).unwrap().scaled(C64::from_polar(1.0, 0.7));
        let (fit, f) = fit_cat_amplitude(&psi).unwrap();
        assert!((fit - beta).norm() < 1e-8);
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn requires_single_qubit() {
        let two = HilbertLayout::new(2, 8).unwrap();
        assert!(cat_state(0.1, 1.0, two).is_err());
        assert!(decompose_cat(&Ket::ground(two)).is_err());
        let _ = coherent(C64::from(0.1), layout()).unwrap();
    }
}
