use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("`{name}` takes {expected} argument(s), got {got} (byte {offset})")]
    Arity {
        name: String,
        expected: String,
        got: usize,
        offset: usize,
    },

    #[error("domain error in `{expr}`: {reason}")]
    Domain { expr: String, reason: String },

    #[error("invalid chart: {0}")]
    Chart(String),

    #[error("chart mismatch: {0}")]
    ChartMismatch(String),

    #[error("degree error: {0}")]
    Degree(String),

    #[error("expected {expected} values, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("degenerate {what} at {point:?}")]
    Degenerate { what: String, point: Vec<f64> },

    #[error("not effective: residual {residual:e} at {point:?}")]
    NotEffective { residual: f64, point: Vec<f64> },

    #[error("Hitchin-degenerate form: {0}")]
    NondegeneracyViolation(String),

    #[error("invariance failure: residual {residual:e} at {point:?}")]
    NotInvariant { residual: f64, point: Vec<f64> },

    #[error("grid: {0}")]
    Grid(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Byte offset into the source text, for parse errors.
    pub fn offset(&self) -> Option<usize> {
        match self {
            Error::Syntax { offset, .. }
            | Error::UnknownIdentifier { offset, .. }
            | Error::Arity { offset, .. } => Some(*offset),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
