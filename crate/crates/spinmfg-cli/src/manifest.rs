//! Run manifests: every command that writes files also writes a JSON manifest
//! echoing the fully-resolved configuration, the seed, the code version, the
//! wall time, and the list of produced files, so any run can be replayed.

use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
}

pub struct ManifestBuilder {
    command: String,
    config: serde_json::Value,
    seed: Option<u64>,
    started: Instant,
    outputs: Vec<PathBuf>,
}

impl ManifestBuilder {
    pub fn new(command: &str, config: serde_json::Value, seed: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            config,
            seed,
            started: Instant::now(),
            outputs: Vec::new(),
        }
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    /// Writes `<stem>.manifest.json` next to the outputs and returns its path.
    pub fn write(self, path: &Path) -> anyhow::Result<PathBuf> {
        let manifest = RunManifest {
            command: self.command,
            argv: std::env::args().collect(),
            config: self.config,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs.iter().map(|p| p.display().to_string()).collect(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&manifest)?)?;
        Ok(path.to_path_buf())
    }
}
