use thiserror::Error;

/// Errors raised by the numerical layer and the verification harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter tuple violates an admissibility invariant. The message is
    /// the violated invariant, verbatim.
    #[error("{0}")]
    InvalidParams(String),

    /// `sp = k + alpha + beta`: the sharp constant vanishes and every check
    /// trivializes.
    #[error("degenerate regime: sp must differ from k+alpha+beta")]
    DegenerateRegime,

    /// A test function does not belong to the admissible class of the
    /// regime, or the caller must use a different code path.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An integral diverges for the given exponent combination.
    #[error("non-integrable: {0}")]
    NonIntegrable(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn non_integrable(msg: impl Into<String>) -> Self {
        Error::NonIntegrable(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
