use thiserror::Error;

/// Errors raised by the pole dynamics library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("poles {first} and {second} are closer than the collision threshold ({separation:e} < {threshold:e})")]
    Collision {
        first: String,
        second: String,
        separation: f64,
        threshold: f64,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("duplicate pole label `{0}`")]
    DuplicateLabel(String),
    #[error("state has {positions} positions but the system has {poles} poles")]
    LengthMismatch { positions: usize, poles: usize },
    #[error("{0}")]
    InvalidInput(String),
    #[error("seabed has no Euclidean symmetry usable for this operation")]
    NoSymmetry,
    #[error("pole `{0}` has a strength that is not pure imaginary")]
    NonImaginaryStrength(String),
    #[error("total strength is zero; use the subcenter difference instead")]
    ZeroTotalStrength,
    #[error("a partition block has zero total strength")]
    ZeroSubtotalStrength,
    #[error("t = {t} is at or beyond the collapse time {collapse_time}")]
    Domain { t: f64, collapse_time: f64 },
    #[error("crossing bracket lost: {0}")]
    BracketLost(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{context}: {message}")]
    Io { context: String, message: String },
    #[error("unsupported strength specification: {0}")]
    UnsupportedStrength(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(context: impl Into<String>, err: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            message: err.to_string(),
        }
    }
}
