use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    /// The experiment configuration is malformed or inconsistent.
    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// An input or output file could not be parsed or written.
    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },
    /// A run would exceed the qubit ceiling without the override flag.
    #[error("refused: {0}")]
    Resource(String),
    /// A replayed run did not reproduce the recorded table.
    #[error("replay mismatch: {0}")]
    Replay(String),
    #[error(transparent)]
    Core(#[from] qbnsl::Error),
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn data(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::Data {
            path: path.into(),
            message: message.to_string(),
        }
    }

    /// Process exit status: 2 config, 3 I/O, 4 resource guard, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Io { .. } | CliError::Data { .. } => 3,
            CliError::Resource(_) => 4,
            CliError::Replay(_) => 1,
            CliError::Core(e) => match e {
                qbnsl::Error::ResourceGuard(_) => 4,
                qbnsl::Error::Io(_) | qbnsl::Error::Parse(_) => 3,
                qbnsl::Error::Domain(_) => 2,
            },
        }
    }
}
