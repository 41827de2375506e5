use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use infsim_core::{GraphStats, ScenarioConfig};
use serde::Serialize;

/// Written next to every set of outputs so a run can be reproduced.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    pub graph_source: String,
    pub orientation: String,
    pub graph: GraphStats,
    pub seed: u64,
    pub jobs: usize,
    pub config: ScenarioConfig,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub extra: serde_json::Value,
    pub outputs: Vec<PathBuf>,
    pub duration_secs: f64,
    #[serde(skip)]
    pub started: Option<Instant>,
}

impl RunManifest {
    pub fn write(mut self, out_dir: &Path) -> anyhow::Result<PathBuf> {
        if let Some(start) = self.started {
            self.duration_secs = start.elapsed().as_secs_f64();
        }
        let path = out_dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&self)?;
        fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
