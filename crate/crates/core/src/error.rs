use thiserror::Error;

/// Errors raised by the counting and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A checked 128-bit computation would have wrapped.
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error(
        "quadrature did not converge: estimate {estimate:e}, error estimate {error:e} \
         after {intervals} intervals (tolerance {tol:e})"
    )]
    Quadrature {
        estimate: f64,
        error: f64,
        intervals: usize,
        tol: f64,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
