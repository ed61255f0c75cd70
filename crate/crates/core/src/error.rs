use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("base must be at least 2, got {0}")]
    InvalidBase(u32),

    #[error("digit {digit} at index {index} is not below base {base}")]
    DigitOutOfRange { index: i64, digit: u64, base: u64 },

    #[error("bases differ: {0} vs {1}")]
    BaseMismatch(u32, u32),

    #[error("precision window violation: {0}")]
    Window(String),

    #[error(
        "index window overflow: digit {digit_index} would land at index {target} (limit {limit})"
    )]
    WindowOverflow {
        digit_index: i64,
        target: String,
        limit: u64,
    },

    #[error("denominator {0} is not a power of the base {1}")]
    NotPowerOfBase(u128, u32),

    #[error("exact arithmetic overflow: {0}")]
    Overflow(String),

    #[error("parameter out of domain: {0}")]
    OutOfDomain(String),

    #[error("unsupported profile for this operation: {0}")]
    UnsupportedProfile(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("certification failed: {0}")]
    NotCertified(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
