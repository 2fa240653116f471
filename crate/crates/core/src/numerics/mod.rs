//! Special functions and dense/sparse complex linear algebra kernels.
//!
//! All frequencies in this crate are measured in units of the resonator
//! frequency, so `omega_r = 1` and times are in units of `1 / omega_r`.

mod bessel;
mod expm;
pub mod linalg;
pub(crate) mod sparse;

pub use bessel::{argmax_j1, bessel_j, first_zero_j0, BesselOrder, MAX_BESSEL_ORDER};
pub(crate) use bessel::jn;
pub use expm::{expm, expm_skew_hermitian};
pub use linalg::{CMatrix, CVector, C64};
