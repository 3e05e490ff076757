//! Error taxonomy shared by all modules.
//!
//! Errors are split by how the CLI must exit: configuration problems
//! (bad input, inconsistent options) exit with code 2, numerical
//! failures (singular systems, non-convergence, failed extractions)
//! exit with code 1.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid or inconsistent user input: bad spec values, mismatched
    /// periodicity, missing files, unknown keys.
    #[error("configuration error: {0}")]
    Config(String),

    /// The assembled linear system could not be solved.
    #[error("solver error: {0}")]
    Solver(String),

    /// The Picard iteration failed to reach its tolerance.
    #[error("nonlinear iteration did not converge: {0}")]
    NonConvergence(String),

    /// Far-field extraction found no plateau in the averaged profiles.
    #[error("far-field extraction failed: {0}")]
    Extraction(String),

    /// A quantity is undefined for the given inputs (e.g. slip length at zero flux).
    #[error("undefined quantity: {0}")]
    Undefined(String),

    /// Evaluation was requested outside the discrete domain.
    #[error("point outside domain: {0}")]
    OutOfDomain(String),

    /// Filesystem failure while reading or writing run artifacts.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON in an input document.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            _ => 1,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn solver(msg: impl Into<String>) -> Self {
        Error::Solver(msg.into())
    }
}
