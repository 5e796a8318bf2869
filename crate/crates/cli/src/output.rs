//! Versioned JSON envelopes and run manifests.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const SCHEMA: &str = "implaus.output/1";
pub const MANIFEST_SCHEMA: &str = "implaus.manifest/1";
pub const SCHEMA_DOC: &str = include_str!("../schema/output.schema.json");

/// Wraps a command body with the schema tag, command name and status.
pub fn envelope(command: &str, status: &str, body: Value) -> Value {
    let mut out = Map::new();
    out.insert("schema".into(), SCHEMA.into());
    out.insert("command".into(), command.into());
    out.insert("status".into(), status.into());
    if let Value::Object(fields) = body {
        out.extend(fields);
    }
    Value::Object(out)
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub command: String,
    pub model: Option<String>,
    pub params: Value,
    pub data_source: String,
    pub seed: u64,
    pub tail_convention: String,
    pub outputs: Vec<PathBuf>,
    /// Arguments after the program name; `replay` parses them again.
    pub argv: Vec<String>,
}

/// `<output>.manifest.json` next to the first output.
pub fn manifest_path(first_output: &Path) -> PathBuf {
    let mut name = first_output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    first_output.with_file_name(name)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

pub fn write_manifest(m: &RunManifest) -> Result<PathBuf, String> {
    let first = m.outputs.first().ok_or("a manifest needs at least one output")?;
    let path = manifest_path(first);
    let text = serde_json::to_string_pretty(m).map_err(|e| e.to_string())? + "\n";
    write_file(&path, &text)?;
    Ok(path)
}

pub fn read_manifest(path: &Path) -> Result<RunManifest, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let m: RunManifest = serde_json::from_str(&text).map_err(|e| format!("malformed manifest: {e}"))?;
    if m.schema != MANIFEST_SCHEMA {
        return Err(format!("unsupported manifest schema {:?}", m.schema));
    }
    Ok(m)
}
