//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the numerical kernels and geometry constructors.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method exhausted its budget without reaching tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A solve was requested for which no solution exists.
    #[error("no solution: {0}")]
    NoSolution(String),

    /// A stated precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The discretization is too coarse for the requested measurement.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// The rotating-plane search found no sign change to bisect.
    #[error("no sign change: {0}")]
    NoSignChange(String),

    /// A tolerance contract between operations was violated.
    #[error("tolerance violation: {0}")]
    Tolerance(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A serialized body or header could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
