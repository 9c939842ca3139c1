//! Error type shared by every module in the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by parameter validation and numerical routines.
///
/// The split mirrors how callers are expected to react: `Domain`,
/// `Config`, `Geometry` and `Degenerate` indicate bad inputs and are
/// reportable to the user as validation failures, while `Numerical`
/// indicates an iteration that failed to converge.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside its mathematical domain.
    #[error("parameter out of domain: {0}")]
    Domain(String),
    /// A required optional parameter is missing or inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A geometric construction is impossible (e.g. chord longer than diameter).
    #[error("invalid geometry: {0}")]
    Geometry(String),
    /// A degenerate input that would make the model meaningless.
    #[error("degenerate input: {0}")]
    Degenerate(String),
    /// An iterative routine failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub(crate) fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }
    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}
