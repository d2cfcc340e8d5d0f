//! Error types shared by all solver modules.

use std::fmt;

/// Errors raised by the physics and numerics layers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a documented precondition.
    Domain(String),
    /// The requested operation does not support the given confinement variant.
    UnsupportedConfinement(String),
    /// An iterative routine failed to converge or lost its bracket.
    /// Carries enough context to diagnose the failure.
    Numeric(String),
    /// An inverse-design target has no solution inside the search bracket.
    /// Fields report the bracket endpoints and the objective values there.
    NoSolution {
        what: String,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::UnsupportedConfinement(msg) => {
                write!(f, "unsupported confinement: {msg}")
            }
            Error::Numeric(msg) => write!(f, "numeric error: {msg}"),
            Error::NoSolution { what, lo, hi, f_lo, f_hi } => write!(
                f,
                "no solution for {what} in bracket [{lo:e}, {hi:e}] \
                 (objective {f_lo:e} .. {f_hi:e})"
            ),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
