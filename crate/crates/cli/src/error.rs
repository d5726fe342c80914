use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A flag value that could not be used; the message names the flag.
    #[error("--{flag}: {msg}")]
    Flag { flag: &'static str, msg: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("output error: {0}")]
    Output(String),
    #[error(transparent)]
    Core(#[from] bernstein_core::Error),
}

impl CliError {
    pub fn flag(flag: &'static str, msg: impl std::fmt::Display) -> Self {
        CliError::Flag { flag, msg: msg.to_string() }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}

/// Attaches a flag name to library and parse errors.
pub trait FlagContext<T> {
    fn flag(self, flag: &'static str) -> Result<T, CliError>;
}

impl<T, E: std::fmt::Display> FlagContext<T> for Result<T, E> {
    fn flag(self, flag: &'static str) -> Result<T, CliError> {
        self.map_err(|e| CliError::flag(flag, e))
    }
}
