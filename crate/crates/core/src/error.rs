use std::path::PathBuf;

/// Errors produced while loading or validating grid data.
#[derive(Debug, thiserror::Error)]
pub enum CoreError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    /// A semantic check failed. `field` is a path-like locator such as
    /// `lines[3].to_bus` or `nodes["mid-a"].probability`.
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

impl CoreError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        CoreError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}
