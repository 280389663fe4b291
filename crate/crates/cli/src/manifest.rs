use std::path::Path;

use serde::{Deserialize, Serialize};

/// Record of one CLI run. Written as `manifest.json` next to the outputs.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    /// Arguments after the program name; `replay` re-parses these.
    pub argv: Vec<String>,
    pub input: Option<String>,
    pub ranks: Option<String>,
    pub alpha: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub weighted: Option<bool>,
    pub seed: u64,
    pub threads: usize,
    pub cells: Option<usize>,
    pub scale: Option<String>,
    pub raw_window: Option<usize>,
    pub filter: Option<FilterRecord>,
    pub nodes: Option<usize>,
    pub links: Option<usize>,
    pub iterations: Option<IterationRecord>,
    pub converged: bool,
    pub kappa: Option<f64>,
    /// Output file names, relative to the manifest's directory.
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterRecord {
    pub mode: String,
    pub eta: Option<String>,
    pub curve_etas: Vec<String>,
    pub inverted: Option<usize>,
    pub fraction: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct IterationRecord {
    pub pagerank: Option<usize>,
    pub cheirank: Option<usize>,
    pub filtered_cheirank: Option<usize>,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(dir.join(MANIFEST_NAME), text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub const MANIFEST_NAME: &str = "manifest.json";
