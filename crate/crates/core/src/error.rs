use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("index {index} out of range (count {count})")]
    Range { index: u64, count: u64 },

    #[error("expected a face of dimension {expected}, got {actual}")]
    Dimension { expected: u32, actual: u32 },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("growth bound exceeded: {0}")]
    BoundedGrowth(String),

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
