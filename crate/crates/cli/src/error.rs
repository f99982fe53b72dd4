use thiserror::Error;

/// Everything here maps to exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{context}: {message}")]
    Input { context: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("{0}")]
    Usage(String),
}
