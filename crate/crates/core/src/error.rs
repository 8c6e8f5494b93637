use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular {system} block in cell {cell}")]
    SingularBlock { system: &'static str, cell: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("need at least {needed} recorded iterations to estimate the spectral radius, have {have}")]
    InsufficientHistory { needed: usize, have: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
