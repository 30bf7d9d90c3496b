//! A small (eps, xi) grid of bounds experiments run through the same code
//! path as the CLI, writing per-cell manifests and an aggregate table.
//!
//! cargo run --release --example sweep [out-dir]

use std::path::PathBuf;

use echo_lattice::experiment::{run, ExperimentConfig, Kind, RunOptions};

fn main() -> anyhow::Result<()> {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("echo-sweep"), PathBuf::from);
    let mut cfg = ExperimentConfig::parse(
        r#"
kind = "sweep"
[sweep]
cell = "bounds"
epsilons = [0.01, 0.03]
sigmas = [1.5, 2.0, 3.0]
[output]
plots = false
"#,
    )?;
    cfg.kind = Kind::Sweep;
    let outcome = run(&cfg, &out, &RunOptions { verdicts: true, jobs: Some(2) })?;
    for v in &outcome.manifest.verdicts {
        println!("{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    println!("aggregate in {}", out.join("aggregate.csv").display());
    Ok(())
}
