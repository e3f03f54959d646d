//! Versioned file envelopes and atomic writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use spf_core::channels::{ChannelDescription, LAYOUT_VERSION};

use crate::error::{CliError, CliResult};

pub const SCHEMA: u32 = 1;
pub const TOOL: &str = "spf";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Metadata block carried by every output file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Meta {
    pub schema: u32,
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub layout_version: u32,
    pub seed: u64,
    pub config: Value,
}

impl Meta {
    pub fn new(command: &str, seed: u64, config: Value) -> Self {
        Meta {
            schema: SCHEMA,
            tool: TOOL.into(),
            tool_version: TOOL_VERSION.into(),
            command: command.into(),
            layout_version: LAYOUT_VERSION,
            seed,
            config,
        }
    }

    /// `#`-prefixed lines placed above CSV output.
    pub fn csv_comment(&self) -> String {
        format!("# {}\n", serde_json::to_string(self).expect("metadata serialises"))
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, contents: &str) -> CliResult<()> {
    let Some(path) = path else {
        print!("{contents}");
        return Ok(());
    };
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn emit_json<T: Serialize>(path: Option<&Path>, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|source| CliError::Json { path: path.map(Path::to_path_buf).unwrap_or_default(), source })?;
    text.push('\n');
    emit(path, &text)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let value: Value =
        serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.to_path_buf(), source })?;
    let schema = value.get("meta").and_then(|m| m.get("schema")).and_then(Value::as_u64);
    if schema != Some(u64::from(SCHEMA)) {
        return Err(CliError::Usage(format!("{}: expected an spf file with schema {SCHEMA}", path.display())));
    }
    serde_json::from_value(value).map_err(|source| CliError::Json { path: path.to_path_buf(), source })
}

/// Channel file written by `build`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub meta: Meta,
    pub channel: ChannelDescription,
    pub state: spf_core::state::StateSnapshot,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchSummary {
    pub method: String,
    pub max_weight: usize,
    pub count: usize,
    pub pair_count: usize,
    pub xz_pair_count: usize,
}

/// Pattern file written by `patterns` and `gpf`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatternFile {
    pub meta: Meta,
    pub channel: ChannelDescription,
    /// Qubit labels by index, the keys of every measurement map.
    pub qubits: Vec<String>,
    pub input_qubit: usize,
    pub output_qubit: usize,
    pub search: SearchSummary,
    pub patterns: Vec<spf_core::MeasurementPattern>,
}
