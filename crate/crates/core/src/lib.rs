//! Simulation of the transversal conditional-displacement interaction between
//! parametrically driven charge qubits and an ultrastrongly coupled LC
//! resonator.
//!
//! Frequencies are measured in units of the resonator frequency `omega_r`
//! and times in units of `1 / omega_r`; `hbar = 1`.

pub mod cat;
pub mod config;
pub mod error;
pub mod experiment;
pub mod gate;
pub mod hilbert;
pub mod model;
pub mod numerics;
pub mod propagate;

pub use error::{Error, Result};
pub use hilbert::{HilbertLayout, Ket, Operator};
pub use model::{DriveParams, SystemParams};
pub use numerics::C64;

/// Crate version, echoed into every result file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
