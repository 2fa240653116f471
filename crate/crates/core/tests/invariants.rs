use std::f64::consts::{PI, TAU};

use cdisp::cat::{cat_with_amplitude, decompose_cat};
use cdisp::config::ExperimentConfig;
use cdisp::gate::{beta_phi, makhlin_invariants, phase_gate_matrix, GateAngle};
use cdisp::hilbert::{self, HilbertLayout};
use cdisp::numerics::{bessel_j, linalg, BesselOrder};
use cdisp::{Ket, C64};
use ndarray::Array1;
use proptest::prelude::*;

fn order(l: i32) -> BesselOrder {
    l.try_into().unwrap()
}

proptest! {
    #[test]
    fn bessel_reflection(l in -63i32..=63, x in -20.0f64..20.0) {
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        let a = bessel_j(order(-l), x).unwrap();
        let b = bessel_j(order(l), x).unwrap();
        prop_assert!((a - sign * b).abs() < 1e-13);
    }

    #[test]
    fn bessel_three_term_recurrence(l in -62i32..=62, x in 0.1f64..20.0) {
        let lhs = bessel_j(order(l - 1), x).unwrap() + bessel_j(order(l + 1), x).unwrap();
        let rhs = 2.0 * l as f64 / x * bessel_j(order(l), x).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-11 * (1.0 + rhs.abs()));
    }

    #[test]
    fn bessel_addition_sum_rule(x in 0.0f64..20.0) {
        // J_0^2 + 2 sum_{l>0} J_l^2 = 1
        let mut s = bessel_j(order(0), x).unwrap().powi(2);
        for l in 1..=64 {
            s += 2.0 * bessel_j(order(l), x).unwrap().powi(2);
        }
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_gate_is_symmetric_unitary(theta in -10.0f64..10.0) {
        let u = phase_gate_matrix(theta);
        prop_assert!(linalg::unitarity_defect(&u) < 1e-13);
        let swapped = [(0, 0), (1, 2), (2, 1), (3, 3)];
        for (i, si) in swapped {
            for (j, sj) in swapped {
                prop_assert!((u[[i, j]] - u[[si, sj]]).norm() < 1e-15);
            }
        }
        let inv = makhlin_invariants(&u).unwrap();
        // G1 = cos^2(2 theta), G2 = 1 + 2 cos^2(2 theta) for this gate family
        let c2 = (2.0 * theta).cos().powi(2);
        prop_assert!((inv.g1 - C64::from(c2)).norm() < 1e-9);
        prop_assert!((inv.g2 - (1.0 + 2.0 * c2)).abs() < 1e-9);
    }

    #[test]
    fn beta_phi_bounds(r in 0.0f64..0.5, t in 0.0f64..20.0) {
        let (beta, phase) = beta_phi(r, t);
        prop_assert!(beta.norm() <= 2.0 * r + 1e-15);
        prop_assert!(phase >= -1e-15);
        let (b_next, p_next) = beta_phi(r, t + TAU);
        prop_assert!((b_next - beta).norm() < 1e-12);
        prop_assert!((p_next - phase - TAU * r * r).abs() < 1e-10);
        prop_assert!((GateAngle::from_coupling(r).theta - 4.0 * PI * r * r).abs() < 1e-12);
    }

    #[test]
    fn displacement_is_unitary_and_shifts(re in -1.5f64..1.5, im in -1.5f64..1.5) {
        let layout = HilbertLayout::new(1, 40).unwrap();
        let beta = C64::new(re, im);
        let d = hilbert::displacement(beta, layout).unwrap();
        prop_assert!(d.unitarity_defect() < 1e-9);
        let (a, _) = hilbert::ladder(layout);
        let psi = hilbert::coherent(beta, layout).unwrap();
        let mean = psi.inner(&a.apply(&psi).unwrap()).unwrap();
        prop_assert!((mean - beta).norm() < 1e-8);
    }

    #[test]
    fn cat_decomposition_identities(re in -1.2f64..1.2, im in -1.2f64..1.2, phase in 0.0f64..TAU) {
        prop_assume!(re.hypot(im) > 1e-3);
        let layout = HilbertLayout::new(1, 40).unwrap();
        let beta = C64::new(re, im);
        let psi = cat_with_amplitude(beta, layout).unwrap().scaled(C64::from_polar(1.0, phase));
        let dec = decompose_cat(&psi).unwrap();
        prop_assert!((dec.beta - beta).norm() < 1e-8);
        prop_assert!((dec.p_even + dec.p_odd - 1.0).abs() < 1e-10);
        let x = (-2.0 * beta.norm_sqr()).exp();
        prop_assert!((dec.p_even - 0.5 * (1.0 + x)).abs() < 1e-9);
        prop_assert!(dec.parity_leakage() < 1e-8);
    }

    #[test]
    fn unitary_evolution_preserves_norm(seed in 0u64..1000, tau in 0.0f64..5.0) {
        let layout = HilbertLayout::new(2, 5).unwrap();
        let p = cdisp::SystemParams::new(2, 3.0, 0.3).unwrap();
        let h = cdisp::model::lab_hamiltonian(&p, layout).unwrap();
        let u = h.propagate(tau).unwrap();
        let amps: Array1<C64> = (0..layout.dim())
            .map(|k| C64::from_polar(1.0, (seed as f64 + 1.0) * k as f64))
            .collect();
        let psi = Ket::new(layout, amps).unwrap().normalized();
        prop_assert!((u.apply(&psi).unwrap().norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn config_echo_round_trips(g in 0.0f64..1.0, eta in 0.5f64..6.0, a in -3.0f64..3.0, seed in 0u64..=i64::MAX as u64) {
        let mut cfg = ExperimentConfig::preset("gate-0948").unwrap();
        cfg.system.g = g;
        cfg.system.eta = eta;
        cfg.drive.alpha1 = Some(a);
        cfg.gate.seed = seed;
        let back = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
