use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Periodic dimensions incompatible with the requested dilation.
    #[error("period mismatch: {0}")]
    PeriodMismatch(String),

    /// A mask symbol is not in the quotient ideal, so a coset sum differs from 1.
    #[error("mask symbol is not in the quotient ideal (remainder {remainder})")]
    NotInIdeal { remainder: String },

    /// Decomposition requires masks with `a(Wα) = δ(α)`.
    #[error("mask pair is not interpolatory")]
    NotInterpolatory,

    /// Array shapes do not fit together.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A tree node or detail array is absent.
    #[error("missing tree node: {0}")]
    MissingNode(String),

    /// The polynomial reproduction window leaves no usable interior.
    #[error("window too small: {0}")]
    WindowTooSmall(String),

    /// A direction target outside `[1/2, ∞]`, or no word found within the length cap.
    #[error("direction unreachable: {0}")]
    Unreachable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
