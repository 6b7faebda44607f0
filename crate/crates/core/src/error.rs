use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("rate function is negative ({rate}) at t = {time} s")]
    NegativeRate { time: f64, rate: f64 },

    #[error("frequency grid of {requested} points exceeds the cap of {cap} points")]
    GridTooLarge { requested: usize, cap: usize },

    #[error("corrupt timestamp stream at byte offset {offset}: {reason}")]
    CorruptStream { offset: u64, reason: String },

    #[error("symbol {0} is not in the plan alphabet")]
    UnknownSymbol(String),

    #[error("invalid frequency plan: {0}")]
    InvalidPlan(String),

    #[error("malformed image: {0}")]
    MalformedImage(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
