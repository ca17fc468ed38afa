//! Local Fourier analysis of block relaxation schemes for discretized Stokes
//! problems, together with a matrix-free periodic multigrid solver that
//! measures the convergence the analysis predicts.
//!
//! The numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the command-line tool uses.

pub mod error;
pub mod experiment;
pub mod fem;
pub mod gridops;
pub mod lfa;
pub mod linalg;
pub mod mgsolver;
pub mod scalar;
pub mod relaxation;
pub mod symbols;

pub use error::{Error, Result};
pub use scalar::Real;
pub use symbols::{Discretization, DiscretizationSpec as GenericDiscretizationSpec, Frequency as GenericFrequency};

pub type DiscretizationSpec = symbols::DiscretizationSpec<f64>;
pub type Frequency = symbols::Frequency<f64>;
pub type SymbolMatrix = linalg::CMatrix<f64>;
