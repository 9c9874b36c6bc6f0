use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::fmt::Write;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorInfo {
    pub name: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub input: String,
    pub input_sha256: String,
    pub options: Value,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub results: Value,
    pub diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
    /// Human-readable rendering of `results`.
    #[serde(skip)]
    pub lines: Vec<String>,
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is valid JSON");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.command, self.input);
        let _ = writeln!(s, "sha256 {}", self.input_sha256);
        for l in &self.lines {
            let _ = writeln!(s, "{l}");
        }
        for d in &self.diagnostics {
            let _ = writeln!(s, "note: {d}");
        }
        if let Some(e) = &self.error {
            let _ = writeln!(s, "error: {}: {}", e.name, e.message);
        }
        if let Some(t) = self.timing_ms {
            let _ = writeln!(s, "time {t:.3} ms");
        }
        s
    }
}
