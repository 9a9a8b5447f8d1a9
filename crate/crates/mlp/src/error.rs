use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum MlpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("training diverged: {0}")]
    Diverged(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse model file {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("model file {path} has schema version {found}, expected {expected}")]
    SchemaVersion { path: PathBuf, found: u32, expected: u32 },
}
