//! Error type shared by every module.

use thiserror::Error;

/// Failure modes of the library.
///
/// The variants mirror how callers react: domain and hypothesis failures are
/// caller mistakes, precision failures mean the requested answer is not
/// determined by the tracked data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A stated hypothesis of a closed form does not hold.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    /// The answer is not determined at the tracked precision.
    #[error("precision error: {0}")]
    Precision(String),
    /// A distribution is not fine enough for the requested operation.
    #[error("level error: {0}")]
    Level(String),
    /// A polynomial degree exceeds the number of tracked moments.
    #[error("degree error: {0}")]
    Degree(String),
    /// A distribution is not supported where the operation requires.
    #[error("support error: {0}")]
    Support(String),
    /// A geometric series does not converge and has no finite sum.
    #[error("divergence: {0}")]
    Divergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }
    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }
    pub(crate) fn level(msg: impl Into<String>) -> Self {
        Error::Level(msg.into())
    }
    pub(crate) fn degree(msg: impl Into<String>) -> Self {
        Error::Degree(msg.into())
    }
    pub(crate) fn support(msg: impl Into<String>) -> Self {
        Error::Support(msg.into())
    }
}
