use std::path::PathBuf;

pub type Result<T, E = SimError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("scenario field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("malformed scenario: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] apmc_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("no scenario file or built-in named `{0}`")]
    UnknownScenario(String),
}

impl SimError {
    pub fn field(field: impl Into<String>, message: impl ToString) -> Self {
        SimError::Field { field: field.into(), message: message.to_string() }
    }
}
