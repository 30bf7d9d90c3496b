//! Configurable experiments: config files, canned scenarios, CSV/JSON/SVG
//! output and parameter sweeps. The `echo-lattice` binary is a thin shell
//! over [`run`] and [`sweep`].

pub mod config;
pub mod manifest;
pub mod output;
pub mod plot;
pub mod run;
pub mod scenarios;
pub mod sweep;

pub use config::{ExperimentConfig, Kind, Scenario};
pub use manifest::{RunManifest, Verdict};
pub use run::{run, RunOptions, RunOutcome};
pub use sweep::sweep;
