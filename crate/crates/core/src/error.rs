//! Error type shared by every module of the crate.

use std::fmt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by model evaluation, fiducial construction and numerics.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    Domain(String),
    /// The requested fiducial variant is improper at this support boundary.
    Boundary(String),
    /// A root-finding bracket does not enclose the target value.
    Bracket(String),
    /// Adaptive quadrature exhausted its budget above the requested tolerance.
    NonConvergence(String),
    /// A density that should normalize does not (diverging integral).
    Improper(String),
    /// The model/operation combination is not part of the catalog.
    Unsupported(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Boundary(m) => write!(f, "boundary error: {m}"),
            Error::Bracket(m) => write!(f, "bracket error: {m}"),
            Error::NonConvergence(m) => write!(f, "non-convergence: {m}"),
            Error::Improper(m) => write!(f, "improper distribution: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub(crate) fn boundary(msg: impl Into<String>) -> Self {
        Error::Boundary(msg.into())
    }
}
