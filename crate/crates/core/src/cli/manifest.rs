use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Provenance of one command run, written as `manifest.json` beside the
/// artifacts it lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub seeds: Vec<u64>,
    pub outputs: Vec<String>,
    pub tool_version: String,
    pub timestamp: Option<String>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        inputs: Vec<String>,
        seeds: Vec<u64>,
        outputs: Vec<String>,
        timestamp: Option<String>,
    ) -> Self {
        RunManifest {
            command: command.to_string(),
            inputs,
            seeds,
            outputs,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn read(dir: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(dir.join(MANIFEST_FILE))?)?)
    }
}
