use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size {n} outside the supported range 1..={max}")]
    SizeLimit { n: usize, max: usize },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("order violation: {0}")]
    OrderViolation(String),

    #[error("element is not invertible")]
    NonInvertible,

    #[error("not a distribution: {0}")]
    NotADistribution(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("wrong engine: {0}")]
    WrongEngine(String),

    #[error("series kind mismatch: {0}")]
    KindMismatch(String),

    #[error("order shortfall: need order {need}, only {have} is exact")]
    OrderShortfall { need: usize, have: usize },

    #[error("undefined functional: {0}")]
    UndefinedFunctional(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
