//! Mixed-state Schmidt decompositions of bipartite density operators and the
//! separability criteria built on Schmidt coefficients: realignment / computable
//! cross norm, symmetric-polynomial bounds, transform-based criteria (theta
//! family, Zhang, local filters), and entanglement-breaking tests for channels.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the double-precision instantiation used by the CLI.

pub mod bases;
pub mod channels;
pub mod criteria;
pub mod linalg;
pub mod schmidt;
pub mod states;
mod error;
mod scalar;

pub use error::{Error, Result, Violation};
pub use linalg::{BipartiteState, ComplexMatrix, Dims, Subsystem, Tolerances};
pub use num_complex::Complex;
pub use scalar::Real;

pub type Matrix = ComplexMatrix<f64>;
pub type State = BipartiteState<f64>;
pub type Spectrum = schmidt::SchmidtSpectrum<f64>;
pub type Matrix32 = ComplexMatrix<f32>;
pub type State32 = BipartiteState<f32>;
