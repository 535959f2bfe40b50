use std::path::Path;

use gmr_core::GmrError;

pub const INPUT: u8 = 2;
pub const DIMENSION_MISMATCH: u8 = 3;
pub const INVALID_ARGUMENT: u8 = 4;
pub const NOT_CONVERGED: u8 = 5;
const FAILURE: u8 = 1;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new(INVALID_ARGUMENT, message)
    }

    /// Failure while reading or validating an input file.
    pub fn input(path: &Path, err: GmrError) -> Self {
        Self::new(INPUT, format!("{}: {err}", path.display()))
    }
}

/// Maps library errors raised after the inputs were loaded.
impl From<GmrError> for CliError {
    fn from(err: GmrError) -> Self {
        let code = match err {
            GmrError::DimensionMismatch { .. } => DIMENSION_MISMATCH,
            GmrError::InvalidTarget { .. }
            | GmrError::InvalidConfig(_)
            | GmrError::UnsupportedMeasure(_)
            | GmrError::InvalidPair { .. }
            | GmrError::IndexOutOfRange { .. }
            | GmrError::InvalidSelection(_) => INVALID_ARGUMENT,
            GmrError::QuadratureNonConvergence { .. } => NOT_CONVERGED,
            _ => FAILURE,
        };
        Self::new(code, err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self::new(FAILURE, err.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        Self::new(FAILURE, err.to_string())
    }
}
