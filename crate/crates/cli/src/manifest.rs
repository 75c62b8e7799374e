//! Run record written next to every artifact set.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use scc_core::io::write_text;
use scc_core::{EngineError, Result};
use serde::Serialize;

/// What produced the artifacts in this directory, from which effective
/// configuration, and how the run went. The config hash covers parameter
/// values and the content of referenced data files, so identical hashes
/// mean identical outputs.
#[derive(Serialize)]
pub struct Manifest {
    pub command: String,
    pub config_hash: String,
    pub engine_version: String,
    pub timings: BTreeMap<String, u64>,
    pub notes: Vec<String>,
    pub diagnostics: BTreeMap<String, serde_json::Value>,
}

impl Manifest {
    pub fn new(command: &str, config_hash: &str) -> Self {
        Manifest {
            command: command.to_string(),
            config_hash: config_hash.to_string(),
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            timings: BTreeMap::new(),
            notes: Vec::new(),
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn diagnostic(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("diagnostic serializes");
        self.diagnostics.insert(key.to_string(), value);
    }

    /// Record the total wall time and write `manifest.json` into `out`.
    pub fn finish(mut self, elapsed: Duration, out: &Path) -> Result<()> {
        self.timings
            .insert("total_ms".to_string(), elapsed.as_millis() as u64);
        let mut text = serde_json::to_string_pretty(&self)
            .map_err(|e| EngineError::Data(format!("manifest serialization: {e}")))?;
        text.push('\n');
        write_text(&out.join("manifest.json"), &text)
    }
}
