use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("class is unbounded: {0}")]
    Unbounded(String),
    #[error("LP solver failure: {0}")]
    Solver(String),
    #[error("ill-conditioned map: {0}")]
    Conditioning(String),
    #[error("unsupported class: {0}")]
    Unsupported(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
