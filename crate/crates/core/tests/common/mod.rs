//! Independent reference constructions for the integration tests. Nothing
//! here calls into the operator builders of the library.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use cdisp::{DriveParams, Operator, SystemParams};

pub type M = DMatrix<C64>;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Qubit basis (|e>, |g>).
pub fn sigma_plus() -> M {
    M::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)])
}

pub fn sigma_minus() -> M {
    sigma_plus().adjoint()
}

pub fn sigma_x() -> M {
    sigma_plus() + sigma_minus()
}

pub fn sigma_z() -> M {
    M::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(-1.0)]))
}

pub fn annihilation(n: usize) -> M {
    let mut a = M::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = c((k as f64).sqrt());
    }
    a
}

/// Operator on qubit `m` of `n_qubits`, identity elsewhere, then (x) I_N.
pub fn on_qubit(op: &M, m: usize, n_qubits: usize, fock: usize) -> M {
    let mut out = M::identity(1, 1);
    for q in 0..n_qubits {
        let factor = if q == m { op.clone() } else { M::identity(2, 2) };
        out = out.kronecker(&factor);
    }
    out.kronecker(&M::identity(fock, fock))
}

pub fn on_resonator(op: &M, n_qubits: usize) -> M {
    M::identity(1 << n_qubits, 1 << n_qubits).kronecker(op)
}

pub fn to_nalgebra(op: &Operator) -> M {
    let m = op.matrix();
    M::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]])
}

pub fn max_diff(a: &M, b: &M) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Undriven lab Hamiltonian built from Kronecker products.
pub fn lab_hamiltonian(p: &SystemParams, fock: usize) -> M {
    let n = p.n_qubits;
    let a = on_resonator(&annihilation(fock), n);
    let ad = a.adjoint();
    let mut h = (&ad * &a) * c(p.omega_r);
    for m in 0..n {
        h += on_qubit(&sigma_z(), m, n, fock) * c(0.5 * p.omega_q);
        h += (&a + &ad) * on_qubit(&sigma_x(), m, n, fock) * c(p.g);
    }
    if n == 2 {
        for (m, k) in [(0, 1), (1, 0)] {
            h += on_qubit(&sigma_x(), m, n, fock) * on_qubit(&sigma_x(), k, n, fock) * c(p.d_coupling);
        }
    }
    h
}

/// Rotating-frame Hamiltonian in closed form, with every drive phase
/// factor evaluated as exp(+-i alpha cos(omega t - phi)) directly.
pub fn closed_form_rotating(p: &SystemParams, d: &DriveParams, t: f64, fock: usize) -> M {
    let n = p.n_qubits;
    let a = on_resonator(&annihilation(fock), n);
    let ad = a.adjoint();
    let sp: Vec<M> = (0..n).map(|m| on_qubit(&sigma_plus(), m, n, fock)).collect();
    let sm: Vec<M> = (0..n).map(|m| on_qubit(&sigma_minus(), m, n, fock)).collect();
    let cosine = (d.omega_d() * t - d.phi()).cos();
    let alpha = d.alpha();
    let phase = |x: f64| C64::from_polar(1.0, x);

    let mut h = M::zeros(ad.nrows(), ad.ncols());
    let mut add = |x: M| {
        let hc = x.adjoint();
        h += x + hc;
    };
    for m in 0..n {
        let dm = p.omega_r - p.omega_q;
        let dp = p.omega_r + p.omega_q;
        add(&ad * &sm[m] * (c(p.g) * phase(dm * t + alpha[m] * cosine)));
        add(&ad * &sp[m] * (c(p.g) * phase(dp * t - alpha[m] * cosine)));
    }
    if n == 2 {
        for (m, k) in [(0usize, 1usize), (1, 0)] {
            add(&sp[m] * &sp[k] * (c(p.d_coupling) * phase(2.0 * p.omega_q * t - (alpha[m] + alpha[k]) * cosine)));
            add(&sp[m] * &sm[k] * (c(p.d_coupling) * phase(-(alpha[m] - alpha[k]) * cosine)));
        }
    }
    h
}
