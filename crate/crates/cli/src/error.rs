use polyvem::VemError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown case '{name}'; registered cases: {available}")]
    UnknownCase { name: String, available: String },

    #[error("config line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("invalid value for '{key}': {msg}")]
    InvalidValue { key: String, msg: String },

    #[error(transparent)]
    Vem(#[from] VemError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
