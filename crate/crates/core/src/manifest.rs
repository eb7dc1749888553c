//! Reproducibility bookkeeping for output directories.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const TOOL_NAME: &str = "avdiff";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_FILE: &str = "manifest.json";

pub fn digest_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputRecord {
    pub name: String,
    /// File the input was read from; `None` for bundled data.
    pub path: Option<String>,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArtifactRecord {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub scenarios: Vec<String>,
    pub inputs: Vec<InputRecord>,
    pub overrides: BTreeMap<String, String>,
    pub output_dir: String,
    /// Hash over tool version, command, input contents and overrides.
    pub input_hash: String,
    pub artifacts: Vec<ArtifactRecord>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        scenarios: Vec<String>,
        inputs: Vec<InputRecord>,
        overrides: BTreeMap<String, String>,
        output_dir: &Path,
    ) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(TOOL_NAME.as_bytes());
        hasher.update([0]);
        hasher.update(TOOL_VERSION.as_bytes());
        hasher.update([0]);
        hasher.update(command.as_bytes());
        hasher.update([0]);
        for input in &inputs {
            hasher.update(input.name.as_bytes());
            hasher.update([0]);
            hasher.update(input.sha256.as_bytes());
            hasher.update([0]);
        }
        for (key, value) in &overrides {
            hasher.update(key.as_bytes());
            hasher.update(b"=");
            hasher.update(value.as_bytes());
            hasher.update([0]);
        }
        Self {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            scenarios,
            inputs,
            overrides,
            output_dir: output_dir.display().to_string(),
            input_hash: hex::encode(hasher.finalize()),
            artifacts: Vec::new(),
        }
    }

    /// Writes `contents` to `dir/file` and records its digest.
    pub fn write_artifact(&mut self, dir: &Path, file: &str, contents: &str) -> Result<()> {
        let path = dir.join(file);
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.artifacts.push(ArtifactRecord {
            file: file.to_string(),
            sha256: digest_hex(contents.as_bytes()),
        });
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        text
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, self.to_json()).map_err(|e| Error::io(&path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(name: &str, body: &str) -> InputRecord {
        InputRecord {
            name: name.into(),
            path: None,
            sha256: digest_hex(body.as_bytes()),
        }
    }

    #[test]
    fn hash_depends_on_content_not_output_dir() {
        let a = RunManifest::new("report", vec![], vec![input("r", "x")], BTreeMap::new(), Path::new("a"));
        let b = RunManifest::new("report", vec![], vec![input("r", "x")], BTreeMap::new(), Path::new("b"));
        let c = RunManifest::new("report", vec![], vec![input("r", "y")], BTreeMap::new(), Path::new("a"));
        assert_eq!(a.input_hash, b.input_hash);
        assert_ne!(a.input_hash, c.input_hash);
    }

    #[test]
    fn overrides_change_the_hash() {
        let base = RunManifest::new("va", vec![], vec![], BTreeMap::new(), Path::new("o"));
        let mut overrides = BTreeMap::new();
        overrides.insert("va_basis".to_string(), "cost".to_string());
        let other = RunManifest::new("va", vec![], vec![], overrides, Path::new("o"));
        assert_ne!(base.input_hash, other.input_hash);
    }
}
