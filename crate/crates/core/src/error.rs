use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Syntax error in set-expression or points-file text (1-based position).
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A value violates a type invariant (ratio out of range, bad MSum, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// An operation was called outside its domain (e.g. `lpt` on a
    /// non-closed set).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The exact decision procedures cannot settle this instance.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A construction failed its own internal checks.
    #[error("construction check failed: {0}")]
    Construction(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
