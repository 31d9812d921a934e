//! Output envelope and the CLI error type.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

pub const TOOL_NAME: &str = "smf";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Any failure after argument parsing. Rendered to stderr as one JSON
/// object so callers can match on `kind` without scraping prose.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] smf_core::CoreError),
    #[error(transparent)]
    Data(#[from] smf_data::DataError),
    #[error(transparent)]
    Text(#[from] smf_text::TextError),
    #[error(transparent)]
    Detect(#[from] smf_detect::DetectError),
    #[error("{detail}")]
    Invalid { detail: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn invalid(detail: impl Into<String>) -> Self {
        CliError::Invalid {
            detail: detail.into(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(_) => "core",
            CliError::Data(_) => "data",
            CliError::Text(_) => "text",
            CliError::Detect(_) => "detect",
            CliError::Invalid { .. } => "invalid",
            CliError::Io { .. } => "io",
        }
    }

    pub fn to_json(&self) -> String {
        json!({
            "error": {
                "kind": self.kind(),
                "detail": self.to_string(),
            }
        })
        .to_string()
    }
}

/// The stdout report: tool identity, full parameter echo, result summary.
pub fn print_envelope(command: &str, params: &Value, result: &Value) {
    let envelope = json!({
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": command,
        "params": params,
        "result": result,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&envelope).expect("envelope serializes")
    );
}

/// Provenance sidecar placed next to a file payload (`<name>.meta.json`)
/// or inside a directory payload (`meta.json`), so binary outputs carry
/// the tool version and parameters too.
pub fn write_sidecar(payload: &Path, command: &str, params: &Value) -> Result<(), CliError> {
    let meta = json!({
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": command,
        "params": params,
    });
    let path = sidecar_path(payload);
    let text = serde_json::to_string_pretty(&meta).expect("meta serializes");
    fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))
}

fn sidecar_path(payload: &Path) -> PathBuf {
    if payload.is_dir() {
        return payload.join("meta.json");
    }
    let name = payload
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    payload.with_file_name(format!("{name}.meta.json"))
}

/// Writes a deterministic text payload.
pub fn write_text_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}
