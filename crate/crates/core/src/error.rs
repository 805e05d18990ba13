use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// A single violated density-operator invariant with its measured magnitude.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    /// `max |rho - rho^dagger|`.
    NotHermitian { deviation: f64 },
    /// `|tr(rho) - 1|`.
    TraceNotOne { deviation: f64 },
    /// Smallest eigenvalue of the Hermitian part.
    NotPositive { min_eigenvalue: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotHermitian { deviation } => write!(f, "not Hermitian (max |rho - rho^dagger| = {deviation:e})"),
            Violation::TraceNotOne { deviation } => write!(f, "trace differs from 1 by {deviation:e}"),
            Violation::NotPositive { min_eigenvalue } => write!(f, "not positive (smallest eigenvalue {min_eigenvalue:e})"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch { context: &'static str, expected: String, found: String },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange { name: &'static str, value: String, range: &'static str },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("{routine} did not converge after {sweeps} sweeps (residual {residual:e})")]
    NoConvergence { routine: &'static str, sweeps: usize, residual: f64 },

    #[error("invalid density operator: {}", list_violations(.0))]
    InvalidState(Vec<Violation>),

    #[error("superoperators must be jointly linear or jointly antilinear")]
    MixedLinearity,

    #[error("negative radicand {value:e} for subsystem {subsystem}: supplied epsilon is inconsistent with the transform")]
    NegativeRadicand { subsystem: char, value: f64 },

    #[error("filter is not contractive: operator norm {norm} exceeds 1")]
    FilterNotContractive { norm: f64 },

    #[error("Kraus operators are not trace preserving: max |sum K^dagger K - I| = {deviation:e}")]
    NotTracePreserving { deviation: f64 },
}

fn list_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn mismatch(context: &'static str, expected: impl fmt::Display, found: impl fmt::Display) -> Error {
    Error::DimensionMismatch { context, expected: expected.to_string(), found: found.to_string() }
}
