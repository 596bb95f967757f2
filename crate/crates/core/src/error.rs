use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller passed an argument outside the operation's domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A space or distance vector violated one of its invariants.
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    /// A budget (rejection attempts, game size, enumeration size) was exhausted.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("semantic error: {0}")]
    Semantic(String),

    /// Misuse of a stateful API, e.g. asking for a strategy in a lost game.
    #[error("logic error: {0}")]
    Logic(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag, used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Argument(_) => "argument",
            Error::InvalidSpace(_) => "invalid_space",
            Error::Resource(_) => "resource",
            Error::Syntax { .. } => "syntax",
            Error::Semantic(_) => "semantic",
            Error::Logic(_) => "logic",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
