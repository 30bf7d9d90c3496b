use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use echo_lattice::experiment::{run, ExperimentConfig, Kind, RunOptions};

#[derive(Parser)]
#[command(name = "echo-lattice", version, about = "Resonance cascade experiments on the shear-plus-wave lattice")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config (TOML-style key/value sections).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; ECHO_LATTICE_OUT overrides it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Use fixed-step RK4 with this step instead of adaptive DP5(4).
    #[arg(long, global = true, value_name = "H", num_args = 0..=1, default_missing_value = "0.01")]
    fixed_step: Option<f64>,

    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Whether failed verdicts change the exit code.
    #[arg(long, global = true, value_enum, default_value_t = Switch::On)]
    verdicts: Switch,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Wave amplitudes and their energy.
    Wave,
    /// Per-mode homogeneous propagator, energy bounds and C_alpha.
    Homogeneous,
    /// The coupled mode lattice (scenario chosen in the config).
    Lattice,
    /// Frozen-resonant and two-mode toy models.
    Toy,
    /// Echo product bounds and Gevrey weights.
    Bounds,
    /// Parameter grid of another experiment.
    Sweep,
}

impl Command {
    fn kind(self) -> Kind {
        match self {
            Command::Wave => Kind::Wave,
            Command::Homogeneous => Kind::Homogeneous,
            Command::Lattice => Kind::Lattice,
            Command::Toy => Kind::Toy,
            Command::Bounds => Kind::Bounds,
            Command::Sweep => Kind::Sweep,
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<bool> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => ExperimentConfig::default(),
    };
    cfg.kind = cli.command.kind();
    if let Some(h) = cli.fixed_step {
        cfg.fixed_step = Some(h);
    }
    cfg.validate()?;
    let out = std::env::var_os("ECHO_LATTICE_OUT")
        .map(PathBuf::from)
        .or(cli.out)
        .unwrap_or_else(|| cfg.output.dir.clone());
    let opts = RunOptions {
        verdicts: cli.verdicts == Switch::On,
        jobs: cli.jobs,
    };
    let outcome = run(&cfg, &out, &opts)?;
    for v in &outcome.manifest.verdicts {
        println!("{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    println!("wrote {}", out.display());
    Ok(outcome.passed())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
