//! States and operators on the truncated qubit(s) x resonator product space.
//!
//! The tensor ordering is `qubit_1 (x) qubit_2 (x) resonator`, with each qubit
//! basis ordered `(|e>, |g>)` so that `sigma_z |e> = +|e>`. The two-qubit
//! computational basis therefore reads `{|ee>, |eg>, |ge>, |gg>}`.

use std::ops::{Add, Mul, Sub};

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::numerics::linalg::{self, CMatrix, CVector, C64, I};
use crate::numerics::{expm, expm_skew_hermitian};

pub const DEFAULT_FOCK_DIM: usize = 32;

/// Dimensions of the product space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertLayout {
    n_qubits: usize,
    fock_dim: usize,
}

impl HilbertLayout {
    pub fn new(n_qubits: usize, fock_dim: usize) -> Result<Self> {
        if !(1..=2).contains(&n_qubits) {
            return Err(Error::InvalidLayout(format!(
                "n_qubits must be 1 or 2, got {n_qubits}"
            )));
        }
        if fock_dim < 4 {
            return Err(Error::InvalidLayout(format!(
                "fock_dim must be at least 4, got {fock_dim}"
            )));
        }
        Ok(Self { n_qubits, fock_dim })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    pub fn qubit_dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.qubit_dim() * self.fock_dim
    }

    /// Flat index of `|qubit_index> (x) |n>`.
    pub fn index(&self, qubit_index: usize, n: usize) -> usize {
        qubit_index * self.fock_dim + n
    }

    /// Splits a flat index into `(qubit_index, n)`.
    pub fn split(&self, index: usize) -> (usize, usize) {
        (index / self.fock_dim, index % self.fock_dim)
    }

    /// sigma_z eigenvalue (+1 for |e>, -1 for |g>) of qubit `m` within the
    /// qubit-register index `qubit_index`.
    pub fn sz_eigenvalue(&self, qubit_index: usize, m: usize) -> f64 {
        let bit = (qubit_index >> (self.n_qubits - 1 - m)) & 1;
        if bit == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn check_qubit(&self, m: usize) -> Result<()> {
        if m >= self.n_qubits {
            return Err(Error::QubitIndexOutOfRange {
                index: m,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Largest |beta| admitted for displacements on this truncation.
    pub fn max_displacement_sq(&self) -> f64 {
        self.fock_dim as f64 / 9.0
    }

    pub(crate) fn check_displacement(&self, amplitude: f64) -> Result<()> {
        let bound = self.max_displacement_sq();
        if !amplitude.is_finite() || amplitude * amplitude > bound {
            return Err(Error::AmplitudeTooLarge { amplitude, bound });
        }
        Ok(())
    }
}

/// Single-qubit basis level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Excited,
    Ground,
}

impl Level {
    fn bit(self) -> usize {
        match self {
            Level::Excited => 0,
            Level::Ground => 1,
        }
    }
}

/// Qubit-register index of a product of basis levels, first qubit most
/// significant.
pub fn register_index(levels: &[Level]) -> usize {
    levels.iter().fold(0, |acc, l| (acc << 1) | l.bit())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

impl PauliAxis {
    pub fn matrix(self) -> CMatrix {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        // rows/cols ordered (|e>, |g>)
        let m = match self {
            PauliAxis::X => [[o, l], [l, o]],
            PauliAxis::Y => [[o, -I], [I, o]],
            PauliAxis::Z => [[l, o], [o, -l]],
            PauliAxis::Plus => [[o, l], [o, o]],
            PauliAxis::Minus => [[o, o], [l, o]],
        };
        Array2::from_shape_fn((2, 2), |(r, c)| m[r][c])
    }
}

/// A pure state on a [`HilbertLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    layout: HilbertLayout,
    amplitudes: CVector,
}

impl Ket {
    pub fn new(layout: HilbertLayout, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                found: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { value: f64::NAN });
        }
        Ok(Self { layout, amplitudes })
    }

    /// `|levels> (x) |n>`.
    pub fn basis(layout: HilbertLayout, levels: &[Level], n: usize) -> Result<Self> {
        if levels.len() != layout.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: layout.n_qubits(),
                found: levels.len(),
            });
        }
        if n >= layout.fock_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.fock_dim(),
                found: n,
            });
        }
        let mut amplitudes = Array1::zeros(layout.dim());
        amplitudes[layout.index(register_index(levels), n)] = C64::new(1.0, 0.0);
        Ok(Self { layout, amplitudes })
    }

    /// All qubits in |g>, resonator in vacuum.
    pub fn ground(layout: HilbertLayout) -> Self {
        let levels = vec![Level::Ground; layout.n_qubits()];
        Self::basis(layout, &levels, 0).expect("ground state is always in range")
    }

    /// `(sum_i a_i |i>) (x) |resonator>` with qubit register amplitudes `a` and
    /// resonator amplitudes `resonator`.
    pub fn product(layout: HilbertLayout, register: &[C64], resonator: &[C64]) -> Result<Self> {
        if register.len() != layout.qubit_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.qubit_dim(),
                found: register.len(),
            });
        }
        if resonator.len() != layout.fock_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.fock_dim(),
                found: resonator.len(),
            });
        }
        let amplitudes = Array1::from_shape_fn(layout.dim(), |k| {
            let (q, n) = layout.split(k);
            register[q] * resonator[n]
        });
        Self::new(layout, amplitudes)
    }

    pub fn layout(&self) -> HilbertLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, qubit_index: usize, n: usize) -> C64 {
        self.amplitudes[self.layout.index(qubit_index, n)]
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes.mapv_inplace(|z| z / n);
        }
        self
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Euclidean distance `|| self - other ||`.
    pub fn distance(&self, other: &Ket) -> Result<f64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn scaled(&self, factor: C64) -> Ket {
        Ket {
            layout: self.layout,
            amplitudes: &self.amplitudes * factor,
        }
    }

    /// Reduced density matrix of the qubit register (resonator traced out).
    pub fn reduced_qubit_density(&self) -> CMatrix {
        let q = self.layout.qubit_dim();
        let f = self.layout.fock_dim();
        Array2::from_shape_fn((q, q), |(i, j)| {
            (0..f)
                .map(|n| self.amplitude(i, n) * self.amplitude(j, n).conj())
                .sum()
        })
    }

    /// Resonator amplitudes conditioned on the qubit register being in
    /// basis state `qubit_index` (unnormalised).
    pub fn resonator_branch(&self, qubit_index: usize) -> CVector {
        Array1::from_shape_fn(self.layout.fock_dim(), |n| self.amplitude(qubit_index, n))
    }
}

/// A dense operator on a [`HilbertLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    layout: HilbertLayout,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(layout: HilbertLayout, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != layout.dim() || matrix.ncols() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                found: matrix.nrows(),
            });
        }
        if !linalg::all_finite(&matrix) {
            return Err(Error::NonFinite { value: f64::NAN });
        }
        Ok(Self { layout, matrix })
    }

    pub(crate) fn from_parts(layout: HilbertLayout, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), layout.dim());
        Self { layout, matrix }
    }

    pub fn identity(layout: HilbertLayout) -> Self {
        Self::from_parts(layout, linalg::identity(layout.dim()))
    }

    pub fn zeros(layout: HilbertLayout) -> Self {
        Self::from_parts(layout, Array2::zeros((layout.dim(), layout.dim())))
    }

    /// Diagonal operator with the given entries.
    pub fn diagonal(layout: HilbertLayout, entries: &[C64]) -> Result<Self> {
        if entries.len() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                found: entries.len(),
            });
        }
        let mut m = Array2::zeros((layout.dim(), layout.dim()));
        for (k, &v) in entries.iter().enumerate() {
            m[[k, k]] = v;
        }
        Self::new(layout, m)
    }

    /// `register_op (x) I_resonator` for an operator on the qubit register.
    pub fn on_register(layout: HilbertLayout, register_op: &CMatrix) -> Result<Self> {
        if register_op.nrows() != layout.qubit_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.qubit_dim(),
                found: register_op.nrows(),
            });
        }
        let eye = linalg::identity(layout.fock_dim());
        Ok(Self::from_parts(layout, linalg::kron(register_op, &eye)))
    }

    /// `I_register (x) resonator_op`.
    pub fn on_resonator(layout: HilbertLayout, resonator_op: &CMatrix) -> Result<Self> {
        if resonator_op.nrows() != layout.fock_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.fock_dim(),
                found: resonator_op.nrows(),
            });
        }
        let eye = linalg::identity(layout.qubit_dim());
        Ok(Self::from_parts(layout, linalg::kron(&eye, resonator_op)))
    }

    pub fn layout(&self) -> HilbertLayout {
        self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self::from_parts(self.layout, linalg::dagger(&self.matrix))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self::from_parts(self.layout, &self.matrix * factor)
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        if ket.layout != self.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(Ket {
            layout: self.layout,
            amplitudes: self.matrix.dot(&ket.amplitudes),
        })
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.matrix)
    }

    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.matrix)
    }

    /// Entrywise max |self - other|.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        linalg::max_abs_diff(&self.matrix, &other.matrix)
    }

    /// exp(-i self tau); `self` must be Hermitian.
    pub fn propagate(&self, tau: f64) -> Result<Operator> {
        Ok(Self::from_parts(
            self.layout,
            expm_skew_hermitian(&self.matrix, tau)?,
        ))
    }

    /// Matrix element `<qubit_row, n_row| self |qubit_col, n_col>`.
    pub fn element(&self, row: (usize, usize), col: (usize, usize)) -> C64 {
        self.matrix[[
            self.layout.index(row.0, row.1),
            self.layout.index(col.0, col.1),
        ]]
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.layout, rhs.layout, "layout mismatch");
        Operator::from_parts(self.layout, &self.matrix + &rhs.matrix)
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.layout, rhs.layout, "layout mismatch");
        Operator::from_parts(self.layout, &self.matrix - &rhs.matrix)
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.layout, rhs.layout, "layout mismatch");
        Operator::from_parts(self.layout, self.matrix.dot(&rhs.matrix))
    }
}

/// Pauli operator `axis` acting on qubit `m`, identity elsewhere.
pub fn pauli_on(m: usize, axis: PauliAxis, layout: HilbertLayout) -> Result<Operator> {
    layout.check_qubit(m)?;
    let mut register = linalg::identity(1);
    for k in 0..layout.n_qubits() {
        let factor = if k == m {
            axis.matrix()
        } else {
            linalg::identity(2)
        };
        register = linalg::kron(&register, &factor);
    }
    Operator::on_register(layout, &register)
}

/// Truncated annihilation matrix on the resonator factor alone.
pub fn resonator_annihilation(fock_dim: usize) -> CMatrix {
    let mut a = Array2::zeros((fock_dim, fock_dim));
    for n in 1..fock_dim {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// `(a, a^dag)` on the full space.
pub fn ladder(layout: HilbertLayout) -> (Operator, Operator) {
    let a = resonator_annihilation(layout.fock_dim());
    let a = Operator::on_resonator(layout, &a).expect("dimensions match by construction");
    let a_dag = a.dagger();
    (a, a_dag)
}

/// `a^dag a` on the full space.
pub fn number_operator(layout: HilbertLayout) -> Operator {
    let entries: Vec<C64> = (0..layout.dim())
        .map(|k| C64::new(layout.split(k).1 as f64, 0.0))
        .collect();
    Operator::diagonal(layout, &entries).expect("dimensions match by construction")
}

/// exp(beta a^dag - beta^* a) on the resonator factor alone.
pub fn resonator_displacement(beta: C64, fock_dim: usize) -> CMatrix {
    let a = resonator_annihilation(fock_dim);
    let generator = linalg::dagger(&a) * beta - &a * beta.conj();
    expm(&generator)
}

/// Displacement operator D(beta) = exp(beta a^dag - beta^* a).
pub fn displacement(beta: C64, layout: HilbertLayout) -> Result<Operator> {
    layout.check_displacement(beta.norm())?;
    Operator::on_resonator(layout, &resonator_displacement(beta, layout.fock_dim()))
}

/// Coherent-state amplitudes D(beta)|0> on the resonator factor.
pub fn coherent_amplitudes(beta: C64, fock_dim: usize) -> CVector {
    let d = resonator_displacement(beta, fock_dim);
    d.column(0).to_owned()
}

/// Coherent state |beta> with every qubit in |g>.
pub fn coherent(beta: C64, layout: HilbertLayout) -> Result<Ket> {
    layout.check_displacement(beta.norm())?;
    let mut register = vec![C64::new(0.0, 0.0); layout.qubit_dim()];
    register[layout.qubit_dim() - 1] = C64::new(1.0, 0.0);
    let resonator = coherent_amplitudes(beta, layout.fock_dim());
    Ket::product(layout, &register, resonator.as_slice().expect("contiguous"))
}

/// |<psi|phi>|^2.
pub fn fidelity(psi: &Ket, phi: &Ket) -> Result<f64> {
    Ok(psi.inner(phi)?.norm_sqr().min(1.0))
}
