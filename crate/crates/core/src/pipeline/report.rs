//! Versioned machine-readable reports.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Value,
    pub artifacts: BTreeMap<String, Value>,
    pub verdicts: BTreeMap<String, bool>,
    pub diagnostics: Vec<String>,
    pub timing_ms: BTreeMap<String, f64>,
}

impl PipelineReport {
    pub fn new(command: &str, inputs: Value) -> Self {
        PipelineReport { schema_version: SCHEMA_VERSION, command: command.into(), inputs, ..Default::default() }
    }

    pub fn artifact(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or_else(|e| Value::String(format!("unserializable: {e}")));
        self.artifacts.insert(key.into(), v);
    }

    pub fn verdict(&mut self, key: &str, ok: bool) {
        self.verdicts.insert(key.into(), ok);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.diagnostics.push(text.into());
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }

    pub fn failed_verdicts(&self) -> Vec<String> {
        self.verdicts.iter().filter(|(_, &v)| !v).map(|(k, _)| k.clone()).collect()
    }

    /// Runs `f` and records its wall time under `key`.
    pub fn timed<T>(&mut self, key: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timing_ms.insert(key.into(), start.elapsed().as_secs_f64() * 1e3);
        out
    }

    /// Merges another report's verdicts and artifacts under a prefix.
    pub fn absorb(&mut self, prefix: &str, other: &PipelineReport) {
        for (k, v) in &other.verdicts {
            self.verdicts.insert(format!("{prefix}.{k}"), *v);
        }
        for (k, v) in &other.artifacts {
            self.artifacts.insert(format!("{prefix}.{k}"), v.clone());
        }
        for (k, v) in &other.timing_ms {
            self.timing_ms.insert(format!("{prefix}.{k}"), *v);
        }
        self.diagnostics.extend(other.diagnostics.iter().map(|d| format!("{prefix}: {d}")));
    }
}
