use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("unregistered hypothesis {0}")]
    UnregisteredHypothesis(u64),

    #[error("unknown learner id {0}")]
    UnknownLearner(u64),

    #[error("hypothesis {0} names the construction currently being computed")]
    SelfReference(u64),

    #[error("cannot build a text for the empty set (hypothesis {0})")]
    EmptyText(u64),

    #[error("row 0 has not settled for base e = {0}")]
    NoStableRowZero(u64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("json error: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Json(err.to_string())
    }
}
