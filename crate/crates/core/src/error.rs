use thiserror::Error;

/// Errors raised by the coherence library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("underdetermined grid: order {order} needs at least {required} directions, got {available}")]
    Underdetermined {
        order: usize,
        required: usize,
        available: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("degenerate sensor {index}: response has zero energy")]
    DegenerateSensor { index: usize },

    #[error("index out of range: {0}")]
    OutOfRange(String),
}

impl Error {
    /// True for errors caused by a vanishing coherence denominator.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::DegenerateSensor { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
