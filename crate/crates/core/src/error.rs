use thiserror::Error;

/// Errors shared by the exact-arithmetic modules.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the mathematical domain was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// An enumeration or word-length cap was exceeded.
    #[error("size limit: {what} = {got} exceeds cap {limit}")]
    SizeLimit {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    /// Polynomial text could not be parsed; `pos` is a byte offset.
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// A word or polynomial refers to a family label with no parameters.
    #[error("unknown family label {0}")]
    UnknownLabel(u8),

    /// A centered-scaled limit does not exist for the requested input.
    #[error("divergent limit: {0}")]
    Divergent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
