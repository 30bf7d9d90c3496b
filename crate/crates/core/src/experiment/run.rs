//! Execution of a single experiment: compute, write CSV/SVG/manifest, judge.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::config::{ExperimentConfig, Kind, Scenario};
use super::manifest::RunManifest;
use super::output::write_table;
use super::plot::{Plot, Series};
use super::scenarios::{self, wave_solver, BoundedOutcome, InitialData};
use crate::coupled::{integrate_lattice, LatticeRun, NormRecord, RecordSpec};
use crate::error::{Error, Result};
use crate::growth::{fit_stirling_constant, growth_product, stirling_bounds, GevreyWeight, RegimeThresholds};
use crate::homogeneous::{energy_excursion, estimate_c_alpha, semigroup_error};
use crate::mode_lattice::{k0, k1, resonance_partition, ModeIndex, ModeState};
use crate::ode::{Solver, Stepping};
use crate::toy::{legendre_exponent, resonance_kernel_integral_with, toy_growth, LegendreKind};
use crate::wave::{envelope_check, WaveTrajectory};

/// Slack on the homogeneous energy comparisons.
const ENERGY_SLACK: f64 = 1e-6;
const SEMIGROUP_TOL: f64 = 1e-6;
const KERNEL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// When false, failed verdicts are recorded but do not fail the run.
    pub verdicts: bool,
    /// Worker threads for sweeps (`None`: rayon's default).
    pub jobs: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { verdicts: true, jobs: None }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub manifest: RunManifest,
    pub verdicts_enforced: bool,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        !self.verdicts_enforced || self.manifest.passed()
    }
}

/// Run `cfg` and write its outputs into `out_dir` (created if missing).
pub fn run(cfg: &ExperimentConfig, out_dir: &Path, opts: &RunOptions) -> Result<RunOutcome> {
    cfg.validate()?;
    if cfg.kind == Kind::Sweep {
        return super::sweep::sweep(cfg, out_dir, opts);
    }
    std::fs::create_dir_all(out_dir)?;
    let mut m = RunManifest::new(cfg);
    let solver = cfg.solver();
    match cfg.kind {
        Kind::Wave => run_wave(cfg, &solver, out_dir, &mut m)?,
        Kind::Homogeneous => run_homogeneous(cfg, &solver, out_dir, &mut m)?,
        Kind::Lattice => run_lattice(cfg, &solver, out_dir, &mut m)?,
        Kind::Toy => run_toy(cfg, &solver, out_dir, &mut m)?,
        Kind::Bounds => run_bounds(cfg, &solver, out_dir, &mut m)?,
        Kind::Sweep => unreachable!(),
    }
    m.write(out_dir)?;
    Ok(RunOutcome {
        dir: out_dir.to_path_buf(),
        manifest: m,
        verdicts_enforced: opts.verdicts,
    })
}

fn halve(solver: &Solver) -> Solver {
    match solver.stepping {
        Stepping::Fixed { h } => Solver {
            stepping: Stepping::Fixed { h: 0.5 * h },
            ..*solver
        },
        Stepping::Adaptive => Solver {
            rel_tol: 0.5 * solver.rel_tol,
            abs_tol: 0.5 * solver.abs_tol,
            ..*solver
        },
    }
}

fn plot_if(cfg: &ExperimentConfig, dir: &Path, name: &str, m: &mut RunManifest, plot: impl FnOnce() -> Plot) -> Result<()> {
    if cfg.output.plots {
        plot().write(&dir.join(name))?;
        m.files.push(name.to_string());
    }
    Ok(())
}

fn table(dir: &Path, name: &str, m: &mut RunManifest, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    write_table(&dir.join(name), header, rows)?;
    m.files.push(name.to_string());
    Ok(())
}

fn run_wave(cfg: &ExperimentConfig, solver: &Solver, dir: &Path, m: &mut RunManifest) -> Result<()> {
    let p = &cfg.params;
    let w = &cfg.wave;
    let traj = WaveTrajectory::dense(p.alpha, p.epsilon, w.t_end, solver)?;
    let fine = WaveTrajectory::dense(p.alpha, p.epsilon, w.t_end, &halve(solver))?;
    let c1 = traj.energy_constant();
    let c2 = fine.energy_constant();
    let change = (c1 - c2).abs() / c1;
    m.stats = traj.stats;
    m.stats.merge(fine.stats);
    m.threshold("t_end", w.t_end);
    m.verdict(
        "energy_constant_stable",
        change < w.stability,
        format!("C* = {c1:.6}, halved tolerance C* = {c2:.6}, relative change {change:.3e} (limit {})", w.stability),
    );
    let env = envelope_check(&traj);
    if env.stable_regime {
        let ok = env.f_ratio <= w.envelope_max && env.g_ratio <= w.envelope_max;
        m.verdict(
            "envelope",
            ok,
            format!(
                "sup |f|/(eps sqrt(1+t)) = {:.4}, sup |g| sqrt(1+t)/eps = {:.4} (limit {})",
                env.f_ratio, env.g_ratio, w.envelope_max
            ),
        );
    }
    let e0 = traj.energy[0];
    let n = w.samples.max(2);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let t = w.t_end * i as f64 / (n - 1) as f64;
            let (f, g) = traj.eval(t);
            let e = crate::wave::wave_energy(p.alpha, f, g, t);
            vec![t, f, g, e, if e0 != 0.0 { e / e0 } else { f64::NAN }]
        })
        .collect();
    table(dir, "wave.csv", m, &["t", "f", "g", "energy", "energy_ratio"], rows.clone())?;
    m.extra = json!({
        "energy_constant": c1,
        "energy_constant_halved": c2,
        "energy_ratio_range": traj.energy_ratio_range(),
        "envelope": env,
        "transport_shift": traj.transport_shift(w.t_end),
    });
    plot_if(cfg, dir, "wave_energy.svg", m, || {
        Plot::new(format!("wave energy, alpha = {}", p.alpha), "t", "E(t)/E(0)")
            .series(Series::new("E/E0", rows.iter().map(|r| (r[0], r[4])).collect()))
    })
}

fn run_homogeneous(cfg: &ExperimentConfig, solver: &Solver, dir: &Path, m: &mut RunManifest) -> Result<()> {
    let p = &cfg.params;
    let h = &cfg.homogeneous;
    let s0 = ModeState::real(h.z0, h.q0);
    let mut rows = Vec::new();
    let mut worst_var: f64 = 0.0;
    let mut worst_rig: f64 = 0.0;
    let mut all_var = true;
    let mut all_rig = true;
    for &xi in &h.xis {
        for &k in &h.modes {
            let mode = ModeIndex::new(k, xi);
            let ex = energy_excursion(p.alpha, mode, h.t_start, h.t_end, s0, solver)?;
            all_var &= ex.sup_ratio <= ex.variation_bound + ENERGY_SLACK;
            all_rig &= ex.sup_ratio <= ex.rigorous_bound + ENERGY_SLACK;
            worst_var = worst_var.max(ex.sup_ratio / ex.variation_bound);
            worst_rig = worst_rig.max(ex.sup_ratio / ex.rigorous_bound);
            rows.push(vec![
                k as f64,
                xi,
                ex.sup_ratio,
                ex.inf_ratio,
                ex.sup_norm_ratio,
                ex.variation,
                ex.variation_bound,
                ex.rigorous_bound,
            ]);
        }
    }
    m.verdict(
        "energy_variation_bound",
        all_var,
        format!("max sup(E/E0) / exp(V/(2 sqrt(alpha))) = {worst_var:.6}"),
    );
    m.verdict(
        "energy_gronwall_bound",
        all_rig,
        format!("max sup(E/E0) / Gronwall bound = {worst_rig:.6}"),
    );
    table(
        dir,
        "homogeneous.csv",
        m,
        &["k", "xi", "sup_ratio", "inf_ratio", "sup_norm_ratio", "variation", "variation_bound", "gronwall_bound"],
        rows.clone(),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst_sg: f64 = 0.0;
    let mut sg_rows = Vec::new();
    if !h.modes.is_empty() && !h.xis.is_empty() {
        for _ in 0..h.semigroup_triples {
            let k = h.modes[rng.random_range(0..h.modes.len())];
            let xi = h.xis[rng.random_range(0..h.xis.len())];
            let mut ts: [f64; 3] = std::array::from_fn(|_| rng.random_range(h.t_start..=h.t_end));
            ts.sort_by(f64::total_cmp);
            let err = semigroup_error(p.alpha, ModeIndex::new(k, xi), ts[0], ts[1], ts[2], solver)?;
            worst_sg = worst_sg.max(err);
            sg_rows.push(vec![k as f64, xi, ts[0], ts[1], ts[2], err]);
        }
    }
    m.verdict(
        "semigroup",
        worst_sg < SEMIGROUP_TOL,
        format!("max relative composition error {worst_sg:.3e} over {} triples", sg_rows.len()),
    );
    table(dir, "semigroup.csv", m, &["k", "xi", "t1", "t2", "t3", "error"], sg_rows)?;

    let c = estimate_c_alpha(p.alpha, h.c_alpha_grid(), solver)?;
    m.c_alpha = Some(c.value);
    m.extra = json!({ "c_alpha": c });
    let xi0 = h.xis.first().copied().unwrap_or(0.0);
    plot_if(cfg, dir, "homogeneous.svg", m, || {
        let pick = |col: usize| rows.iter().filter(|r| r[1] == xi0).map(|r| (r[0], r[col])).collect();
        Plot::new(format!("mode energy excursion, xi = {xi0}"), "k", "sup E/E0")
            .series(Series::new("measured", pick(2)))
            .series(Series::new("exp(V/(2 sqrt alpha))", pick(6)))
    })
}

fn record_rows(records: &[NormRecord]) -> Vec<Vec<f64>> {
    records
        .iter()
        .map(|r| vec![r.t, r.norm, r.energy_norm, r.norm_k1, r.norm_rest, r.tail_fraction])
        .collect()
}

const RECORD_HEADER: [&str; 6] = ["t", "norm", "energy_norm", "norm_k1", "norm_rest", "tail_fraction"];

fn write_run(cfg: &ExperimentConfig, dir: &Path, m: &mut RunManifest, run: &LatticeRun) -> Result<()> {
    m.stats.merge(run.stats);
    m.max_tail_fraction = m.max_tail_fraction.max(run.spill.max_fraction);
    let rows = record_rows(&run.records);
    table(dir, "records.csv", m, &RECORD_HEADER, rows.clone())?;
    if !run.states.is_empty() {
        let mut mode_rows = Vec::new();
        for s in &run.states {
            for (i, ms) in s.modes.iter().enumerate() {
                mode_rows.push(vec![s.t, s.k_of(i) as f64, ms.z.norm(), ms.q.norm()]);
            }
        }
        table(dir, "modes.csv", m, &["t", "k", "abs_z", "abs_q"], mode_rows)?;
    }
    plot_if(cfg, dir, "norm.svg", m, || {
        Plot::new("lattice norm", "t", "norm")
            .log_y()
            .series(Series::new("total", rows.iter().map(|r| (r[0], r[1])).collect()))
            .series(Series::new("|k| = 1", rows.iter().map(|r| (r[0], r[3])).collect()))
            .series(Series::new("|k| != 1", rows.iter().map(|r| (r[0], r[4])).collect()))
    })
}

fn section_data(cfg: &ExperimentConfig) -> InitialData {
    let s = &cfg.lattice;
    InitialData {
        amplitude: s.amplitude,
        component: s.component,
        ..InitialData::spread(s.spread)
    }
}

fn bounded_verdict(m: &mut RunManifest, name: &str, o: &BoundedOutcome) {
    m.threshold("xi", o.xi);
    m.threshold("t_end", o.t_end);
    m.threshold("regimes", o.thresholds);
    m.verdict(
        name,
        o.passed(),
        format!("sup |state|/|state(0)| = {:.6} (limit {:.6})", o.sup_ratio, o.bound),
    );
}

fn run_lattice(cfg: &ExperimentConfig, solver: &Solver, dir: &Path, m: &mut RunManifest) -> Result<()> {
    let p = &cfg.params;
    let s = &cfg.lattice;
    m.threshold("horizon", p.horizon());
    m.threshold("k0", k0(p.xi, p.epsilon));
    m.threshold("k1", k1(p.xi, p.epsilon));
    match s.scenario {
        Scenario::Echo => {
            let o = scenarios::echo_chain(p, s.variant, s.bound_constant, s.c_fit_max, solver)?;
            let r = &o.report;
            m.threshold("t_k", &o.partition.times);
            m.verdict(
                "interval_bounds",
                r.intervals_ok,
                format!("every rho_k <= {} eps xi k^-3/2 (xi/k^2)^gamma_hat", r.bound_constant),
            );
            m.verdict(
                "gamma_hat",
                r.gamma_ok,
                format!("gamma_hat = {:.4} (limit 2 delta = {:.4})", r.gamma_hat, 2.0 * r.delta),
            );
            m.verdict(
                "cascade_total",
                o.c_fit_ok,
                format!("log total = {:.4}, C_fit = {:.4} (limit {})", r.log_total, r.c_fit, o.c_fit_max),
            );
            let rows = r
                .intervals
                .iter()
                .map(|g| vec![g.k as f64, g.t_start, g.t_end, g.rho, g.predicted, g.bound]);
            table(dir, "intervals.csv", m, &["k", "t_start", "t_end", "rho", "predicted", "bound"], rows)?;
            m.extra = json!({ "report": r, "k_trunc": o.k_trunc, "spill": o.run.spill });
            write_run(cfg, dir, m, &o.run)
        }
        Scenario::LongTime => {
            let t_end = s.t_end.unwrap_or_else(|| p.epsilon.powi(-2).max(4.0 * p.xi));
            let o = scenarios::long_time(p, s.variant, t_end, section_data(cfg), solver)?;
            m.threshold("t_start", o.t_start);
            m.threshold("t_end", o.t_end);
            m.verdict(
                "exponent_rest",
                o.exponent_rest <= s.long_time_rest_max,
                format!("|k| != 1 exponent {:.4} (limit {})", o.exponent_rest, s.long_time_rest_max),
            );
            m.verdict(
                "exponent_k1",
                o.exponent_k1 <= s.long_time_k1_max,
                format!("|k| = 1 exponent {:.4} (limit {})", o.exponent_k1, s.long_time_k1_max),
            );
            m.extra = json!({
                "exponent_rest": o.exponent_rest,
                "exponent_k1": o.exponent_k1,
                "log_total": o.log_total,
            });
            write_run(cfg, dir, m, &o.run)
        }
        Scenario::SmallTime | Scenario::HighFrequency => {
            let c = estimate_c_alpha(p.alpha, cfg.homogeneous.c_alpha_grid(), solver)?;
            m.c_alpha = Some(c.value);
            let o = if s.scenario == Scenario::SmallTime {
                scenarios::small_time(p, s.variant, c.value, section_data(cfg), solver)?
            } else {
                scenarios::high_frequency(p, s.variant, c.value, section_data(cfg), solver)?
            };
            let name = if s.scenario == Scenario::SmallTime { "small_time" } else { "high_frequency" };
            bounded_verdict(m, name, &o);
            m.extra = json!({ "sup_ratio": o.sup_ratio, "bound": o.bound, "c_alpha": c });
            write_run(cfg, dir, m, &o.run)
        }
        Scenario::Custom => {
            let t_end = s.t_end.unwrap_or_else(|| p.t_end());
            let params = crate::mode_lattice::Params { t_end: Some(t_end), ..*p };
            params.validate()?;
            let wave = WaveTrajectory::dense(p.alpha, p.epsilon, t_end, &wave_solver(solver))?;
            let data = InitialData::from_section(s);
            let initial = data.build(p.xi, p.k_trunc, s.t_start);
            let record = RecordSpec {
                uniform: s.record_uniform,
                keep_states: s.record_modes,
                spill_limit: s.spill_limit,
                include_partition: p.xi > 0.0,
                ..RecordSpec::default()
            };
            let run = integrate_lattice(s.variant, &params, &initial, (s.t_start, t_end), &record, &wave, solver)?;
            if p.xi > 0.0 && p.epsilon > 0.0 && p.epsilon < 1.0 {
                if let Ok(part) = resonance_partition(p.xi, p.epsilon, p.k_trunc) {
                    m.threshold("t_k", &part.times);
                }
            }
            let n0 = run.records[0].norm;
            m.verdict(
                "completed",
                run.spill.max_fraction <= s.spill_limit,
                format!(
                    "sup |state|/|state(0)| = {:.6}, max boundary fraction {:.3e}",
                    run.sup_norm / n0,
                    run.spill.max_fraction
                ),
            );
            m.extra = json!({ "sup_ratio": run.sup_norm / n0 });
            write_run(cfg, dir, m, &run)
        }
    }
}

fn run_toy(cfg: &ExperimentConfig, solver: &Solver, dir: &Path, m: &mut RunManifest) -> Result<()> {
    let t = &cfg.toy;
    let kern = resonance_kernel_integral_with(t.window);
    let kerr = (kern.value - kern.reference).abs();
    m.verdict(
        "kernel_integral",
        kerr < KERNEL_TOL,
        format!("value {:.15}, reference {:.15}, error {kerr:.2e}", kern.value, kern.reference),
    );

    let mut rows = Vec::new();
    let mut ok = true;
    for &mu in &t.mus {
        for &k in &t.ks {
            let xi = mu * (k * k) as f64;
            let g = toy_growth(xi, k, t.epsilon, 1.0)?;
            ok &= (0.1..=10.0).contains(&g.ratio);
            rows.push(vec![mu, k as f64, xi, g.z_nr, g.scale, g.ratio]);
        }
    }
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r[5]), b.max(r[5])));
    m.verdict(
        "toy_growth_scale",
        ok,
        format!("Z_NR / predicted in [{lo:.4}, {hi:.4}] (allowed [0.1, 10])"),
    );
    table(dir, "toy.csv", m, &["mu", "k", "xi", "z_nr", "predicted", "ratio"], rows)?;

    let fit = legendre_exponent(&t.legendre_mus, t.f, LegendreKind::Envelope, solver)?;
    let hi = 0.5 + 2.0 * t.f + t.exponent_margin;
    m.verdict(
        "legendre_exponent",
        (0.5..=hi).contains(&fit.exponent),
        format!("exponent {:.4}, r2 {:.6} (allowed [0.5, {hi}])", fit.exponent, fit.r2),
    );
    let lrows = fit.mus.iter().zip(&fit.z_nr).map(|(&a, &b)| vec![a, b]);
    table(dir, "legendre.csv", m, &["mu", "z_nr"], lrows)?;
    m.extra = json!({ "kernel": kern, "legendre": fit });
    plot_if(cfg, dir, "legendre.svg", m, || {
        Plot::new("two-mode growth", "mu", "|Z_NR|")
            .log_x()
            .log_y()
            .series(Series::new("Z_NR", fit.mus.iter().copied().zip(fit.z_nr.iter().copied()).collect()))
    })
}

fn run_bounds(cfg: &ExperimentConfig, solver: &Solver, dir: &Path, m: &mut RunManifest) -> Result<()> {
    let b = &cfg.bounds;
    let points: Vec<(f64, f64)> = b
        .epsilons
        .iter()
        .flat_map(|&e| b.sigmas.iter().map(move |&s| (e.powf(-s), e)))
        .collect();
    if points.is_empty() {
        return Err(Error::Config {
            line: 0,
            column: 0,
            message: "bounds grid is empty".into(),
        });
    }
    let log_c = match b.log_c {
        Some(c) => c,
        None => fit_stirling_constant(&points)?,
    };
    m.threshold("log_c", log_c);
    let mut rows = Vec::new();
    let mut upper = true;
    for &(xi, eps) in &points {
        let c = stirling_bounds(xi, eps, log_c)?;
        let w = GevreyWeight {
            c: b.gevrey_c,
            gamma: b.gevrey_gamma,
            epsilon: eps,
        };
        upper &= c.upper_ok;
        rows.push(vec![
            eps,
            xi.ln() / -eps.ln(),
            xi,
            c.log_g,
            c.scale,
            c.upper_log,
            c.lower_log,
            w.log_weight(xi),
            w.log_bound(xi),
            w.log_cap(),
        ]);
    }
    m.verdict("stirling_upper", upper, format!("log G <= {log_c:.4} + 1.5 (eps xi)^(2/3) on {} points", points.len()));

    let eps_min = b.epsilons.iter().copied().fold(f64::INFINITY, f64::min);
    let mut lower = true;
    let mut lower_detail = Vec::new();
    for &sigma in &b.lower_sigmas {
        let c = stirling_bounds(eps_min.powf(-sigma), eps_min, log_c)?;
        lower &= c.lower_ok;
        lower_detail.push(format!("sigma {sigma}: log G {:.3} vs {:.3}", c.log_g, c.lower_log));
    }
    m.verdict("stirling_lower", lower, lower_detail.join("; "));
    table(
        dir,
        "stirling.csv",
        m,
        &["epsilon", "sigma", "xi", "log_g", "scale", "upper_log", "lower_log", "log_weight", "log_bound", "log_cap"],
        rows.clone(),
    )?;

    if cfg.params.alpha > 0.25 {
        let c = estimate_c_alpha(cfg.params.alpha, cfg.homogeneous.c_alpha_grid(), solver)?;
        m.c_alpha = Some(c.value);
        let th = RegimeThresholds::new(cfg.params.xi, cfg.params.epsilon, c.value);
        m.threshold("regimes", th);
    }
    let terms: Vec<u64> = points
        .iter()
        .map(|&(xi, e)| growth_product(xi, e).map(|g| g.terms()))
        .collect::<Result<_>>()?;
    m.extra = json!({ "log_c": log_c, "terms": terms });
    plot_if(cfg, dir, "stirling.svg", m, || {
        let mut sorted = rows.clone();
        sorted.sort_by(|a, b| a[4].total_cmp(&b[4]));
        Plot::new("echo product", "(eps xi)^(2/3)", "log G")
            .series(Series::new("log G", sorted.iter().map(|r| (r[4], r[3])).collect()))
            .series(Series::new("upper", sorted.iter().map(|r| (r[4], r[5])).collect()))
            .series(Series::new("lower", sorted.iter().map(|r| (r[4], r[6])).collect()))
    })
}
