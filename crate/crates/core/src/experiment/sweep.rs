//! Parameter sweeps: one sub-run per `(epsilon, xi)` cell, in parallel.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Kind};
use super::manifest::RunManifest;
use super::output::write_labeled;
use super::run::{run, RunOptions, RunOutcome};
use crate::error::{Error, Result};
use crate::growth::fit_stirling_constant;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub name: String,
    pub epsilon: f64,
    pub xi: f64,
    pub passed: bool,
    /// Failed verdict names, or the error message.
    pub failures: Vec<String>,
}

/// `(epsilon, xi, sigma)` for every cell; `sigma` is `ln xi / -ln eps`.
pub fn cells(cfg: &ExperimentConfig) -> Vec<(f64, f64, f64)> {
    let s = &cfg.sweep;
    let mut out = Vec::new();
    for &e in &s.epsilons {
        if s.xis.is_empty() {
            out.extend(s.sigmas.iter().map(|&sg| (e, e.powf(-sg), sg)));
        } else {
            out.extend(s.xis.iter().map(|&xi| (e, xi, xi.ln() / -e.ln())));
        }
    }
    out
}

/// A single-point fit of `log C` is vacuous, so bounds cells share the
/// constant fitted over the whole grid.
fn cell_config(cfg: &ExperimentConfig, eps: f64, xi: f64, sigma: f64, log_c: Option<f64>) -> ExperimentConfig {
    let mut c = cfg.clone();
    c.kind = cfg.sweep.cell;
    c.params.epsilon = eps;
    c.params.xi = xi;
    if c.kind == Kind::Bounds {
        c.bounds.epsilons = vec![eps];
        c.bounds.sigmas = vec![sigma];
        c.bounds.lower_sigmas.retain(|s| (s - sigma).abs() < 1e-12);
        c.bounds.log_c = c.bounds.log_c.or(log_c);
    }
    c
}

/// Run every cell of `cfg.sweep` under `out_dir/cell-NNN` and aggregate.
/// A cell that errors counts as failed; it does not stop the sweep.
pub fn sweep(cfg: &ExperimentConfig, out_dir: &Path, opts: &RunOptions) -> Result<RunOutcome> {
    std::fs::create_dir_all(out_dir)?;
    let grid = cells(cfg);
    let log_c = if cfg.sweep.cell == Kind::Bounds {
        let pts: Vec<(f64, f64)> = grid.iter().map(|&(e, xi, _)| (xi, e)).collect();
        fit_stirling_constant(&pts).ok()
    } else {
        None
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.jobs {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    let cell_opts = RunOptions { jobs: Some(1), ..*opts };
    let summaries: Vec<CellSummary> = pool.install(|| {
        grid.par_iter()
            .enumerate()
            .map(|(i, &(eps, xi, sigma))| {
                let name = format!("cell-{i:03}");
                let c = cell_config(cfg, eps, xi, sigma, log_c);
                match run(&c, &out_dir.join(&name), &cell_opts) {
                    Ok(o) => CellSummary {
                        name,
                        epsilon: eps,
                        xi,
                        passed: o.manifest.passed(),
                        failures: o
                            .manifest
                            .verdicts
                            .iter()
                            .filter(|v| !v.passed)
                            .map(|v| v.name.clone())
                            .collect(),
                    },
                    Err(e) => CellSummary {
                        name,
                        epsilon: eps,
                        xi,
                        passed: false,
                        failures: vec![format!("error: {e}")],
                    },
                }
            })
            .collect()
    });

    let mut m = RunManifest::new(cfg);
    for s in &summaries {
        let detail = if s.failures.is_empty() {
            format!("eps {}, xi {}", s.epsilon, s.xi)
        } else {
            format!("eps {}, xi {}: {}", s.epsilon, s.xi, s.failures.join("; "))
        };
        m.verdict(s.name.clone(), s.passed, detail);
    }
    write_labeled(
        &out_dir.join("aggregate.csv"),
        &["cell", "epsilon", "xi", "passed"],
        summaries
            .iter()
            .map(|s| (s.name.clone(), vec![s.epsilon, s.xi, if s.passed { 1.0 } else { 0.0 }])),
    )?;
    let f = std::fs::File::create(out_dir.join("aggregate.json"))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(f), &summaries)?;
    m.files = vec!["aggregate.csv".into(), "aggregate.json".into()];
    m.extra = serde_json::to_value(&summaries)?;
    m.write(out_dir)?;
    Ok(RunOutcome {
        dir: out_dir.to_path_buf(),
        manifest: m,
        verdicts_enforced: opts.verdicts,
    })
}
