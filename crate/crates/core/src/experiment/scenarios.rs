//! Canned lattice experiments, one per time regime.
//!
//! Each scenario builds the wave, the initial data and the time span, runs
//! the lattice and condenses the records into the quantities that the
//! corresponding bound speaks about.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::{Component, InitialKind, LatticeSection};
use crate::coupled::{integrate_lattice, LatticeRun, ModelVariant, RecordSpec};
use crate::error::Result;
use crate::growth::{fit_power_law, per_interval_growth, GrowthReport, RegimeThresholds};
use crate::mode_lattice::{k0, resonance_partition, IntervalPartition, LatticeState, ModeState, Params};
use crate::ode::{Solver, Stepping};
use crate::wave::WaveTrajectory;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub kind: InitialKind,
    pub mode: i64,
    pub spread: i64,
    pub amplitude: f64,
    pub component: Component,
}

impl InitialData {
    pub fn mode(k: i64) -> Self {
        InitialData {
            kind: InitialKind::Mode,
            mode: k,
            spread: 0,
            amplitude: 1.0,
            component: Component::Z,
        }
    }

    pub fn spread(k: i64) -> Self {
        InitialData {
            kind: InitialKind::Spread,
            mode: 0,
            spread: k,
            amplitude: 1.0,
            component: Component::Z,
        }
    }

    pub fn from_section(s: &LatticeSection) -> Self {
        InitialData {
            kind: s.initial,
            mode: s.mode,
            spread: s.spread,
            amplitude: s.amplitude,
            component: s.component,
        }
    }

    pub fn build(&self, xi: f64, k_trunc: usize, t: f64) -> LatticeState {
        let mut s = LatticeState::zeros(xi, k_trunc, t);
        let a = Complex64::new(self.amplitude, 0.0);
        let value = match self.component {
            Component::Z => ModeState::new(a, Complex64::default()),
            Component::Q => ModeState::new(Complex64::default(), a),
        };
        match self.kind {
            InitialKind::Mode => {
                if let Some(m) = s.mode_mut(self.mode) {
                    *m = value;
                }
            }
            InitialKind::Spread => {
                for k in -self.spread..=self.spread {
                    if let Some(m) = s.mode_mut(k) {
                        *m = value;
                    }
                }
            }
        }
        s
    }
}

/// Solver for the wave amplitudes: much tighter than the lattice (the ODE
/// is two-dimensional) unless a fixed step is requested.
pub fn wave_solver(lattice: &Solver) -> Solver {
    match lattice.stepping {
        Stepping::Fixed { .. } => Solver {
            max_step_rel: Some(0.05),
            ..*lattice
        },
        Stepping::Adaptive => Solver {
            rel_tol: 1e-12,
            abs_tol: 1e-15,
            max_step_rel: Some(0.05),
            ..*lattice
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EchoOutcome {
    pub variant: ModelVariant,
    pub k0: u64,
    pub k_trunc: usize,
    pub partition: IntervalPartition,
    pub run: LatticeRun,
    pub report: GrowthReport,
    pub c_fit_max: f64,
    pub c_fit_ok: bool,
}

impl EchoOutcome {
    pub fn passed(&self) -> bool {
        self.report.intervals_ok && self.report.gamma_ok && self.c_fit_ok
    }
}

/// Data on mode `k0` entering at `t_{k0}`, integrated through `I_{k0}, ..., I_1`.
/// The span ends at `t_0 = 2 xi`, which usually lies beyond `delta/eps^2`,
/// so regime enforcement is lifted for this run.
pub fn echo_chain(
    params: &Params,
    variant: ModelVariant,
    bound_constant: f64,
    c_fit_max: f64,
    solver: &Solver,
) -> Result<EchoOutcome> {
    let xi = params.xi;
    let k0 = k0(xi, params.epsilon).max(1);
    let k_trunc = params.k_trunc.max(2 * k0 as usize).max(16);
    let partition = resonance_partition(xi, params.epsilon, k_trunc)?;
    let t_start = partition.t(k0 as usize);
    let t_end = partition.t(0);
    let wave = WaveTrajectory::dense(params.alpha, params.epsilon, t_end, &wave_solver(solver))?;
    let p = Params {
        k_trunc,
        enforce_regime: false,
        t_end: Some(t_end),
        ..*params
    };
    let initial = InitialData::mode(k0 as i64).build(xi, k_trunc, t_start);
    let record = RecordSpec::default();
    let run = integrate_lattice(variant, &p, &initial, (t_start, t_end), &record, &wave, solver)?;
    let report = per_interval_growth(&run.records, &partition, k0, 1, params.epsilon, params.delta, bound_constant)?;
    Ok(EchoOutcome {
        variant,
        k0,
        k_trunc,
        partition,
        c_fit_ok: report.c_fit <= c_fit_max,
        c_fit_max,
        run,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongTimeOutcome {
    pub variant: ModelVariant,
    pub t_start: f64,
    pub t_end: f64,
    pub run: LatticeRun,
    /// Log-log slope in `t` of the `|k| != 1` projection.
    pub exponent_rest: f64,
    /// Same for the `|k| = 1` projection.
    pub exponent_k1: f64,
    pub log_total: f64,
}

/// Spread data at `t = 2 xi` integrated to `t_end`; the norms of the two
/// projections are fitted against `t` on uniform records.
pub fn long_time(
    params: &Params,
    variant: ModelVariant,
    t_end: f64,
    data: InitialData,
    solver: &Solver,
) -> Result<LongTimeOutcome> {
    let xi = params.xi;
    let t_start = 2.0 * xi;
    let wave = WaveTrajectory::dense(params.alpha, params.epsilon, t_end, &wave_solver(solver))?;
    let p = Params {
        enforce_regime: false,
        t_end: Some(t_end),
        ..*params
    };
    let initial = data.build(xi, params.k_trunc, t_start);
    let record = RecordSpec {
        include_partition: false,
        uniform: 200,
        ..RecordSpec::default()
    };
    let run = integrate_lattice(variant, &p, &initial, (t_start, t_end), &record, &wave, solver)?;
    let ts: Vec<f64> = run.records.iter().map(|r| r.t).collect();
    let rest: Vec<f64> = run.records.iter().map(|r| r.norm_rest).collect();
    let k1: Vec<f64> = run.records.iter().map(|r| r.norm_k1).collect();
    let first = run.records.first().map_or(1.0, |r| r.norm);
    let last = run.records.last().map_or(1.0, |r| r.norm);
    Ok(LongTimeOutcome {
        variant,
        t_start,
        t_end,
        exponent_rest: fit_power_law(&ts, &rest).unwrap_or(f64::NAN),
        exponent_k1: fit_power_law(&ts, &k1).unwrap_or(f64::NAN),
        log_total: (last / first).ln(),
        run,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedOutcome {
    pub xi: f64,
    pub t_end: f64,
    pub thresholds: RegimeThresholds,
    /// `sup_t |state(t)| / |state(0)|` over accepted steps.
    pub sup_ratio: f64,
    pub bound: f64,
    pub run: LatticeRun,
}

impl BoundedOutcome {
    pub fn passed(&self) -> bool {
        self.sup_ratio <= self.bound
    }
}

fn bounded_run(params: &Params, variant: ModelVariant, t_end: f64, data: InitialData, solver: &Solver) -> Result<LatticeRun> {
    let wave = WaveTrajectory::dense(params.alpha, params.epsilon, t_end, &wave_solver(solver))?;
    let p = Params {
        enforce_regime: false,
        t_end: Some(t_end),
        ..*params
    };
    let initial = data.build(params.xi, params.k_trunc, 0.0);
    let record = RecordSpec {
        include_partition: false,
        uniform: 100,
        ..RecordSpec::default()
    };
    integrate_lattice(variant, &p, &initial, (0.0, t_end), &record, &wave, solver)
}

/// Spread data at `t = 0`, integrated up to `min(T, delta/eps^2)` with
/// `eps T^{3/2} xi^{-1/2} = 1/(4 C_alpha)`. Bound: `4 C_alpha`.
pub fn small_time(params: &Params, variant: ModelVariant, c_alpha: f64, data: InitialData, solver: &Solver) -> Result<BoundedOutcome> {
    let thresholds = RegimeThresholds::new(params.xi, params.epsilon, c_alpha);
    let t_end = thresholds.small_time.min(params.horizon());
    let run = bounded_run(params, variant, t_end, data, solver)?;
    let n0 = run.records[0].norm;
    Ok(BoundedOutcome {
        xi: params.xi,
        t_end,
        thresholds,
        sup_ratio: run.sup_norm / n0,
        bound: 4.0 * c_alpha,
        run,
    })
}

/// `xi = ceil(2 C_alpha eps^-4)`, spread data, `t` in `[0, eps^-2]`.
/// Bound: `2 C_alpha`.
pub fn high_frequency(params: &Params, variant: ModelVariant, c_alpha: f64, data: InitialData, solver: &Solver) -> Result<BoundedOutcome> {
    let xi = (2.0 * c_alpha * params.epsilon.powi(-4)).ceil();
    let p = Params { xi, ..*params };
    let thresholds = RegimeThresholds::new(xi, params.epsilon, c_alpha);
    let t_end = params.epsilon.powi(-2);
    let run = bounded_run(&p, variant, t_end, data, solver)?;
    let n0 = run.records[0].norm;
    Ok(BoundedOutcome {
        xi,
        t_end,
        thresholds,
        sup_ratio: run.sup_norm / n0,
        bound: 2.0 * c_alpha,
        run,
    })
}
