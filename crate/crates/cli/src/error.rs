use std::fmt;

use schmidt_scope::Error;

/// Process exit status. The numeric values are a stable contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Inconclusive = 0,
    Detected = 1,
    Usage = 2,
    Validation = 3,
    Numeric = 4,
}

impl Status {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub status: Status,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { status: Status::Usage, message: message.into() }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self { status: Status::Validation, message: message.into() }
    }

    pub fn context(mut self, prefix: impl fmt::Display) -> Self {
        self.message = format!("{prefix}: {}", self.message);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidState(_) | Error::NotTracePreserving { .. } | Error::FilterNotContractive { .. } => Status::Validation,
            Error::NoConvergence { .. } | Error::NegativeRadicand { .. } => Status::Numeric,
            _ => Status::Usage,
        };
        Self { status, message: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, CliError>;
