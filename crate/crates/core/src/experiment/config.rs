//! Experiment configuration: a flat `key = value` file with sections.
//!
//! ```text
//! kind = "lattice"
//!
//! [params]
//! alpha = 1.0
//! epsilon = 0.05
//! xi = 2000.0
//!
//! [lattice]
//! scenario = "echo"
//! variant = "simplified"
//! ```
//!
//! Every key is optional; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coupled::ModelVariant;
use crate::error::{Error, Result};
use crate::homogeneous::CAlphaGrid;
use crate::mode_lattice::Params;
use crate::ode::Solver;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    #[default]
    Wave,
    Homogeneous,
    Lattice,
    Toy,
    Bounds,
    Sweep,
}

impl std::str::FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "wave" => Kind::Wave,
            "homogeneous" => Kind::Homogeneous,
            "lattice" => Kind::Lattice,
            "toy" => Kind::Toy,
            "bounds" => Kind::Bounds,
            "sweep" => Kind::Sweep,
            other => return Err(format!("unknown experiment kind `{other}`")),
        })
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Kind::Wave => "wave",
            Kind::Homogeneous => "homogeneous",
            Kind::Lattice => "lattice",
            Kind::Toy => "toy",
            Kind::Bounds => "bounds",
            Kind::Sweep => "sweep",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    /// Seed for randomized grids (semigroup triples).
    pub seed: u64,
    /// Fixed RK4 step; when set, every integration uses it.
    pub fixed_step: Option<f64>,
    pub params: Params,
    pub wave: WaveSection,
    pub homogeneous: HomogeneousSection,
    pub lattice: LatticeSection,
    pub toy: ToySection,
    pub bounds: BoundsSection,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: Kind::Wave,
            seed: 7,
            fixed_step: None,
            params: Params::default(),
            wave: WaveSection::default(),
            homogeneous: HomogeneousSection::default(),
            lattice: LatticeSection::default(),
            toy: ToySection::default(),
            bounds: BoundsSection::default(),
            sweep: SweepSection::default(),
            output: OutputSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveSection {
    pub t_end: f64,
    /// Uniform samples written to the CSV (the dense trajectory is used for bounds).
    pub samples: usize,
    /// Ceiling for both envelope constants on `[0, delta/eps^2]`.
    pub envelope_max: f64,
    /// Allowed relative change of the energy constant when the tolerance is halved.
    pub stability: f64,
}

impl Default for WaveSection {
    fn default() -> Self {
        WaveSection {
            t_end: 1e4,
            samples: 2001,
            envelope_max: 10.0,
            stability: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HomogeneousSection {
    pub modes: Vec<i64>,
    pub xis: Vec<f64>,
    pub t_start: f64,
    pub t_end: f64,
    /// Initial `(Z, Q)` as real numbers.
    pub z0: f64,
    pub q0: f64,
    pub semigroup_triples: usize,
    pub c_alpha_level: u32,
    pub c_alpha_u_max: f64,
}

impl Default for HomogeneousSection {
    fn default() -> Self {
        HomogeneousSection {
            modes: (1..=20).collect(),
            xis: vec![5.0, 50.0],
            t_start: 0.0,
            t_end: 200.0,
            z0: 1.0,
            q0: 0.0,
            semigroup_triples: 20,
            c_alpha_level: 4,
            c_alpha_u_max: 1e4,
        }
    }
}

impl HomogeneousSection {
    pub fn c_alpha_grid(&self) -> CAlphaGrid {
        CAlphaGrid {
            u_max: self.c_alpha_u_max,
            level: self.c_alpha_level,
            ..CAlphaGrid::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Data on mode `k0` at `t_{k0}`, integrated through every `I_k` to `t_0`.
    #[default]
    Echo,
    /// Spread data at `t = 2 xi`, integrated to `t_end`.
    LongTime,
    /// Spread data at `t = 0`, integrated to `min(T, delta/eps^2)`.
    SmallTime,
    /// `xi` just above `2 C_alpha eps^-4`, integrated on `[0, eps^-2]`.
    HighFrequency,
    /// Initial data and span exactly as configured.
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    #[default]
    Z,
    Q,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeSection {
    pub scenario: Scenario,
    pub variant: ModelVariant,
    /// `custom` span.
    pub t_start: f64,
    pub t_end: Option<f64>,
    /// Initial data: `mode` puts `amplitude` on one mode, `spread` puts it on
    /// every `|k| <= spread`.
    pub initial: InitialKind,
    pub mode: i64,
    pub spread: i64,
    pub amplitude: f64,
    pub component: Component,
    /// Extra uniformly spaced records.
    pub record_uniform: usize,
    pub record_modes: bool,
    /// Constant in the per-interval bound `rho_k <= C eps xi k^{-3/2} (xi/k^2)^gamma`.
    pub bound_constant: f64,
    /// Ceiling on `log(total) / (eps xi)^{2/3}`.
    pub c_fit_max: f64,
    pub spill_limit: f64,
    /// Ceiling on fitted long-time exponents: `|k| != 1` and `|k| = 1`.
    pub long_time_rest_max: f64,
    pub long_time_k1_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialKind {
    #[default]
    Mode,
    Spread,
}

impl Default for LatticeSection {
    fn default() -> Self {
        LatticeSection {
            scenario: Scenario::Echo,
            variant: ModelVariant::Simplified,
            t_start: 0.0,
            t_end: None,
            initial: InitialKind::Mode,
            mode: 1,
            spread: 3,
            amplitude: 1.0,
            component: Component::Z,
            record_uniform: 200,
            record_modes: false,
            bound_constant: 10.0,
            c_fit_max: 1.5,
            spill_limit: 1e-4,
            long_time_rest_max: 0.6,
            long_time_k1_max: 1.6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToySection {
    pub window: f64,
    /// `xi/k^2` targets for the frozen-resonant model.
    pub mus: Vec<f64>,
    pub ks: Vec<u64>,
    pub epsilon: f64,
    /// Constant forcing and `mu` values for the two-mode model.
    pub f: f64,
    pub legendre_mus: Vec<f64>,
    pub exponent_margin: f64,
}

impl Default for ToySection {
    fn default() -> Self {
        ToySection {
            window: 100.0,
            mus: vec![1e2, 1e3, 1e4],
            ks: vec![1, 2, 5],
            epsilon: 1e-3,
            f: 0.05,
            legendre_mus: vec![1e2, 1e3, 1e4],
            exponent_margin: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsSection {
    pub epsilons: Vec<f64>,
    pub sigmas: Vec<f64>,
    /// Sigmas for which the lower bound is asserted at the smallest epsilon.
    pub lower_sigmas: Vec<f64>,
    pub gevrey_c: f64,
    pub gevrey_gamma: f64,
    /// Fixed `log C` for the upper bound; fitted on the grid when absent.
    pub log_c: Option<f64>,
}

impl Default for BoundsSection {
    fn default() -> Self {
        BoundsSection {
            epsilons: vec![10f64.powf(-1.5), 1e-2],
            sigmas: vec![1.5, 2.0, 3.0, 3.9],
            lower_sigmas: vec![2.0, 3.0],
            gevrey_c: 1.0,
            gevrey_gamma: 0.0,
            log_c: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Experiment run in every cell.
    pub cell: Kind,
    pub epsilons: Vec<f64>,
    /// Either explicit `xis` or `sigmas` with `xi = eps^-sigma`.
    pub xis: Vec<f64>,
    pub sigmas: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            cell: Kind::Bounds,
            epsilons: vec![1e-2],
            xis: Vec::new(),
            sigmas: vec![1.5, 2.0, 3.0, 3.9],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub plots: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("echo-out"),
            plots: true,
        }
    }
}

/// Byte offset to 1-based `(line, column)`.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
            Error::Config {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Render back to the config format.
    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Error::Config { line: 0, column: 0, message: m };
        let mut p = self.params;
        // Scenario-specific spans are checked by the scenarios themselves.
        if self.kind == Kind::Lattice && self.lattice.scenario != Scenario::Custom {
            p.t_end = None;
        }
        p.validate().map_err(|e| bad(e.to_string()))?;
        if let Some(h) = self.fixed_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(bad(format!("fixed_step must be positive, got {h}")));
            }
        }
        if self.kind == Kind::Sweep {
            if self.sweep.cell == Kind::Sweep {
                return Err(bad("sweep cells cannot themselves be sweeps".into()));
            }
            if self.sweep.epsilons.is_empty() || (self.sweep.xis.is_empty() && self.sweep.sigmas.is_empty()) {
                return Err(bad("sweep grid is empty".into()));
            }
        }
        if self.toy.legendre_mus.len() < 2 {
            return Err(bad("toy.legendre_mus needs at least two values".into()));
        }
        Ok(())
    }

    /// The solver implied by the tolerances and `fixed_step`.
    pub fn solver(&self) -> Solver {
        let mut s = Solver::with_tolerances(self.params.rel_tol, self.params.abs_tol);
        if let Some(h) = self.fixed_step {
            s = Solver::fixed(h);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        let c = ExperimentConfig::parse("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
    }

    #[test]
    fn roundtrip_through_text() {
        let mut c = ExperimentConfig {
            kind: Kind::Lattice,
            ..ExperimentConfig::default()
        };
        c.params.xi = 400.0;
        c.lattice.variant = ModelVariant::Full;
        let back = ExperimentConfig::parse(&c.to_text()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn parse_error_has_position() {
        let err = ExperimentConfig::parse("kind = \"wave\"\n[params]\nalpha = =\n").unwrap_err();
        match err {
            Error::Config { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column >= 7);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let err = ExperimentConfig::parse("[params]\nalpah = 1.0\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ExperimentConfig::parse("[params]\nepsilon = 0.5\n").is_err());
        assert!(ExperimentConfig::parse("[params]\nepsilon = 0.5\nenforce_regime = false\n").is_ok());
    }
}
