use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero input")]
    ZeroInput,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("not a square")]
    NotASquare,
    #[error("not a unit")]
    NotAUnit,
    #[error("not a divisor of a distinguished polynomial: {0}")]
    NotDivisorOfDistinguished(String),
    #[error("factor is reducible: {0}")]
    ReducibleFactor(String),
    #[error("unsupported place: {0}")]
    UnsupportedPlace(String),
    #[error("unsupported center: {0}")]
    UnsupportedCenter(String),
    #[error("no canonical extension: {0}")]
    NoCanonicalExtension(String),
    #[error("precision too low to certify witness")]
    PrecisionTooLowToCertify,
    #[error("witness search exhausted")]
    WitnessSearchExhausted,
    #[error("consistency violation: {0}")]
    ConsistencyViolation(String),
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("residue degree cap exceeded: {0}")]
    DegreeCapExceeded(String),
}

impl Error {
    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        Error::InsufficientPrecision(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
