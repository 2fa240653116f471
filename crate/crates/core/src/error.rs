use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Bessel order {order} outside the admitted range |l| <= {max}")]
    BesselOrderOutOfRange { order: i64, max: i32 },

    #[error("argument must be finite, got {value}")]
    NonFinite { value: f64 },

    #[error("operator is not hermitian (max |H - H^dag| = {defect:.3e})")]
    NonHermitian { defect: f64 },

    #[error("operator is not unitary (max |U^dag U - I| = {defect:.3e})")]
    NonUnitary { defect: f64 },

    #[error("invalid Hilbert-space layout: {0}")]
    InvalidLayout(String),

    #[error("qubit index {index} out of range for {n_qubits} qubit(s)")]
    QubitIndexOutOfRange { index: usize, n_qubits: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("layouts of the two operands differ")]
    LayoutMismatch,

    #[error("displacement |beta| = {amplitude:.4} too large for Fock truncation (|beta|^2 must be <= {bound:.4})")]
    AmplitudeTooLarge { amplitude: f64, bound: f64 },

    #[error("the effective Hamiltonian requires phi = pi/2, got phi = {phi}")]
    PhaseConvention { phi: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time step dt = {dt:.4e} exceeds the admitted maximum {max:.4e} (2pi / (50 omega_max))")]
    StepTooLarge { dt: f64, max: f64 },

    #[error("norm drift {drift:.3e} at step {step} (t = {time:.6}) exceeds 1e-6")]
    PropagationAccuracy { step: usize, time: f64, drift: f64 },

    #[error("sweep grid of {points} points exceeds the limit of {max}")]
    GridTooLarge { points: usize, max: usize },

    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("failed to parse config: {0}")]
    ConfigParse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
