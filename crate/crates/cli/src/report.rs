//! Manifest embedded in every report, and output helpers.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value, timestamp: bool) -> Self {
        let timestamp_unix = timestamp.then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Self {
            command: command.into(),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            spectrum_sha256: None,
            timestamp_unix,
        }
    }

    pub fn with_spectrum(mut self, csv: &str) -> Self {
        self.spectrum_sha256 = Some(sha256_hex(csv.as_bytes()));
        self
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// `{"schema_version": .., "manifest": .., ...body}` as pretty JSON.
pub fn envelope<T: Serialize>(manifest: &RunManifest, body: &T) -> String {
    let mut map = serde_json::Map::new();
    map.insert("schema_version".into(), SCHEMA_VERSION.into());
    map.insert("manifest".into(), serde_json::to_value(manifest).expect("manifest serializes"));
    match serde_json::to_value(body).expect("report serializes") {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("result".into(), other);
        }
    }
    let mut out = serde_json::to_string_pretty(&Value::Object(map)).expect("json");
    out.push('\n');
    out
}
