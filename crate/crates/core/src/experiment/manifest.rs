use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::Result;
use crate::ode::Stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Everything needed to reproduce and audit a run, written as `manifest.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config: ExperimentConfig,
    pub c_alpha: Option<f64>,
    /// Named thresholds (`T`, `t_k`, `k0`, cutoffs, horizon, ...).
    pub thresholds: serde_json::Map<String, serde_json::Value>,
    pub stats: Stats,
    pub max_tail_fraction: f64,
    pub verdicts: Vec<Verdict>,
    pub files: Vec<String>,
    pub extra: serde_json::Value,
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig) -> Self {
        RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            c_alpha: None,
            thresholds: serde_json::Map::new(),
            stats: Stats::default(),
            max_tail_fraction: 0.0,
            verdicts: Vec::new(),
            files: Vec::new(),
            extra: serde_json::Value::Null,
        }
    }

    pub fn threshold(&mut self, name: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.thresholds.insert(name.to_string(), v);
    }

    pub fn verdict(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict::new(name, passed, detail));
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let f = std::fs::File::create(dir.join("manifest.json"))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), self)?;
        Ok(())
    }
}
