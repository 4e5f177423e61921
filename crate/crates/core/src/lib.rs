//! Monotone quantum metric tensors on faithful states, the deformed group
//! actions that generate their gradient fields, and a verification harness.

pub mod actions;
pub mod channel;
pub mod config;
pub mod error;
pub mod matrix;
pub mod monotone;
pub mod petz;
pub mod random;
pub mod spectral;
pub mod state;
pub mod verify;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, HermitianMatrix};
pub use spectral::SpectralDecomposition;
pub use state::{DensityState, Observable, PositiveOperator, TangentVector};
