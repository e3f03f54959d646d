use std::path::PathBuf;

use serde_json::json;
use spf_core::SpfError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] SpfError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{failed} of {total} patterns failed certification")]
    Uncertified { failed: usize, total: usize },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn kind(&self) -> String {
        match self {
            CliError::Core(e) => {
                let debug = format!("{e:?}");
                let end = debug.find(|c: char| !c.is_alphanumeric()).unwrap_or(debug.len());
                format!("core.{}", &debug[..end])
            }
            CliError::Io { .. } => "io".into(),
            CliError::Json { .. } => "json".into(),
            CliError::Usage(_) => "usage".into(),
            CliError::Uncertified { .. } => "uncertified".into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Uncertified { .. } => 3,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "schema": 1, "error": { "kind": self.kind(), "message": self.to_string() } }).to_string()
    }
}
