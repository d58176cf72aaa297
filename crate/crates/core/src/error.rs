use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request is well-formed but not supported by this implementation
    /// (e.g. MIMO with more than two antennas on the short side).
    #[error("unsupported: {0}")]
    Capability(String),

    /// A series, continued fraction or quadrature failed to reach tolerance.
    #[error("did not converge: {0}")]
    NonConvergence(String),

    /// A result is not representable as a finite double.
    #[error("overflow: {0}")]
    Overflow(String),

    #[error("invalid prism: {0}")]
    InvalidPrism(String),

    /// Problem size exceeds what an exponential-cost routine accepts.
    #[error("size error: {0}")]
    Size(String),

    #[error("index error: {0}")]
    Index(String),

    /// A log-log fit was asked to use a zero or non-finite sample.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn capability<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Capability(msg.into()))
}
