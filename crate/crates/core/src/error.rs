use alloc::string::String;

/// Errors raised by the estimation library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A basis dimension that is not on the family's ladder.
    #[error("dimension {dim} is not admissible for the {family} family")]
    Dimension { family: String, dim: usize },
    /// A parameter or argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed or inconsistent input data.
    #[error("input error: {0}")]
    Input(String),
    /// An operation that has no closed form for the requested process.
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = core::result::Result<T, Error>;
