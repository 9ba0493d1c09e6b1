use alloc::string::String;

/// Errors raised by the closed-testing core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),

    #[error("p-value at position {index} is not a finite number in [0, 1]: {value}")]
    InvalidPValue { index: usize, value: f64 },

    #[error("category at position {index} is {value}, outside [1, {cap}]")]
    InvalidCategory { index: usize, value: u32, cap: u32 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{axis} index {index} is out of bounds for length {len}")]
    IndexOutOfBounds {
        axis: &'static str,
        index: usize,
        len: usize,
    },

    #[error("duplicate {axis} index {index} in selection")]
    DuplicateIndex { axis: &'static str, index: usize },

    #[error("duplicate identifier {0:?}")]
    DuplicateId(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("brute-force reference limited to {limit} rows, got {got}")]
    TooLarge { limit: usize, got: usize },

    #[error("at least {needed} samples are required, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
