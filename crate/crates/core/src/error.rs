use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("augmentation is undefined on the open instance {0}")]
    OpenAugmentation(String),
    #[error("unknown instance {0:?}")]
    UnknownInstance(String),
    #[error("degree window violated: {0}")]
    Window(String),
    #[error("singular operator: {0}")]
    Singular(String),
    #[error("{0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
