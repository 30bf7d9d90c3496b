//! Acceptance suite: one test per criterion, each printing a single
//! `PASS`/`FAIL` line with the measured quantity and the wall time.
//!
//! Run with `cargo test --test acceptance -- --nocapture --test-threads 1`
//! for uncontended timings.

use std::time::{Duration, Instant};

use echo_lattice::coupled::ModelVariant;
use echo_lattice::experiment::scenarios::{echo_chain, high_frequency, long_time, small_time, InitialData};
use echo_lattice::growth::{fit_stirling_constant, stirling_bounds};
use echo_lattice::homogeneous::{energy_excursion, estimate_c_alpha, semigroup_error, CAlphaGrid};
use echo_lattice::mode_lattice::{ModeIndex, ModeState, Params};
use echo_lattice::ode::Solver;
use echo_lattice::special::gamma;
use echo_lattice::toy::{legendre_exponent, resonance_kernel_integral, toy_growth, LegendreKind};
use echo_lattice::wave::WaveTrajectory;

fn verdict(id: u32, name: &str, passed: bool, detail: &str, start: Instant, limit: Duration) -> bool {
    let took = start.elapsed();
    let in_time = took <= limit;
    let ok = passed && in_time;
    println!(
        "{} [{id:02}] {name}: {detail}; {:.2} s (limit {} s{})",
        if ok { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { ", too slow" }
    );
    ok
}

fn lattice_solver() -> Solver {
    Solver::with_tolerances(1e-8, 1e-10)
}

fn c_alpha(alpha: f64) -> f64 {
    estimate_c_alpha(alpha, CAlphaGrid::default(), &Solver::with_tolerances(1e-10, 1e-12))
        .unwrap()
        .value
}

#[test]
fn c01_resonance_kernel() {
    let start = Instant::now();
    let reference = std::f64::consts::PI.sqrt() * gamma(0.25) / gamma(0.75);
    let k = resonance_kernel_integral();
    let err = (k.value - reference).abs();
    let ok = err < 1e-6 && (reference - 5.244_115_108_584_238).abs() < 1e-12;
    assert!(verdict(
        1,
        "resonance kernel",
        ok,
        &format!("integral {:.12}, reference {reference:.12}, error {err:.2e} (tol 1e-6)", k.value),
        start,
        Duration::from_secs(1),
    ));
}

#[test]
fn c02_toy_growth() {
    let start = Instant::now();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for mu in [1e2, 1e3, 1e4] {
        for k in [1u64, 2, 5, 10] {
            let g = toy_growth(mu * (k * k) as f64, k, 1e-3, 1.0).unwrap();
            lo = lo.min(g.ratio);
            hi = hi.max(g.ratio);
        }
    }
    let ok = lo >= 0.1 && hi <= 10.0;
    assert!(verdict(
        2,
        "toy growth",
        ok,
        &format!("Z_NR / (eps sqrt(xi/k) sqrt(xi/k^2)) in [{lo:.4}, {hi:.4}] (allowed [0.1, 10])"),
        start,
        Duration::from_secs(10),
    ));
}

#[test]
fn c03_wave_energy() {
    let start = Instant::now();
    let base = Solver::with_tolerances(1e-9, 1e-12);
    let half = Solver::with_tolerances(0.5e-9, 0.5e-12);
    let mut worst: f64 = 0.0;
    let mut details = Vec::new();
    for alpha in [0.26, 0.5, 1.0, 5.0] {
        let c1 = WaveTrajectory::dense(alpha, 1e-2, 1e4, &base).unwrap().energy_constant();
        let c2 = WaveTrajectory::dense(alpha, 1e-2, 1e4, &half).unwrap().energy_constant();
        assert!(c1.is_finite() && c1 >= 1.0);
        let change = (c1 - c2).abs() / c1;
        worst = worst.max(change);
        details.push(format!("alpha {alpha}: C* {c1:.4}"));
    }
    assert!(verdict(
        3,
        "wave energy",
        worst < 0.02,
        &format!("{}; max change under halved tolerance {worst:.2e} (limit 2e-2)", details.join(", ")),
        start,
        Duration::from_secs(10),
    ));
}

#[test]
fn c04_homogeneous_stability() {
    let start = Instant::now();
    let solver = Solver::with_tolerances(1e-10, 1e-12);
    let mut all_ok = true;
    let mut details = Vec::new();
    for alpha in [0.3, 1.0, 5.0] {
        let mut worst: f64 = 0.0;
        let mut ok = true;
        for xi in [5.0, 50.0] {
            for k in 1..=20 {
                for s0 in [ModeState::real(1.0, 0.0), ModeState::real(0.0, 1.0)] {
                    let ex = energy_excursion(alpha, ModeIndex::new(k, xi), 0.0, 200.0, s0, &solver).unwrap();
                    ok &= ex.sup_ratio <= ex.variation_bound + 1e-6;
                    worst = worst.max(ex.sup_ratio / ex.variation_bound);
                    // The Gronwall bound must hold regardless.
                    assert!(ex.sup_ratio <= ex.rigorous_bound + 1e-6);
                }
            }
        }
        all_ok &= ok;
        details.push(format!("alpha {alpha}: max ratio to bound {worst:.4}"));
    }
    let mut sg: f64 = 0.0;
    for (i, k) in (1..=10).enumerate() {
        let t1 = 3.0 * i as f64;
        sg = sg.max(semigroup_error(1.0, ModeIndex::new(k, 20.0), t1, t1 + 7.5, t1 + 40.0, &solver).unwrap());
    }
    all_ok &= sg < 1e-6;
    assert!(verdict(
        4,
        "homogeneous stability",
        all_ok,
        &format!("{}; semigroup error {sg:.2e} (tol 1e-6)", details.join(", ")),
        start,
        Duration::from_secs(30),
    ));
}

#[test]
fn c05_two_mode_exponent() {
    let start = Instant::now();
    let fit = legendre_exponent(&[1e2, 1e3, 1e4], 0.05, LegendreKind::Envelope, &Solver::with_tolerances(1e-10, 1e-14)).unwrap();
    let hi = 0.5 + 2.0 * 0.05 + 0.02;
    assert!(verdict(
        5,
        "two-mode exponent",
        (0.5..=hi).contains(&fit.exponent),
        &format!("exponent {:.4} (allowed [0.5, {hi}])", fit.exponent),
        start,
        Duration::from_secs(30),
    ));
}

#[test]
fn c06_stirling_product() {
    let start = Instant::now();
    let eps = [10f64.powf(-1.5), 1e-2];
    let sigmas = [1.5, 2.0, 3.0, 3.9];
    let points: Vec<(f64, f64)> = eps.iter().flat_map(|&e| sigmas.iter().map(move |&s| (e.powf(-s), e))).collect();
    let log_c = fit_stirling_constant(&points).unwrap();
    let upper = points.iter().all(|&(xi, e)| stirling_bounds(xi, e, log_c).unwrap().upper_ok);
    // The lower bound is asserted with no slack at all.
    let lower = [2.0, 3.0].iter().all(|&s| stirling_bounds(1e-2f64.powf(-s), 1e-2, log_c).unwrap().lower_ok);
    assert!(verdict(
        6,
        "Stirling product",
        upper && lower && log_c.is_finite(),
        &format!("fitted log C = {log_c:.4}, upper {upper}, lower {lower}"),
        start,
        Duration::from_secs(1),
    ));
}

#[test]
fn c07_high_frequency() {
    let start = Instant::now();
    let c = c_alpha(1.0);
    let p = Params {
        alpha: 1.0,
        epsilon: 0.3,
        k_trunc: 32,
        enforce_regime: false,
        ..Params::default()
    };
    let o = high_frequency(&p, ModelVariant::Simplified, c, InitialData::spread(3), &lattice_solver()).unwrap();
    assert!(verdict(
        7,
        "high frequency",
        o.passed(),
        &format!("xi {}, sup ratio {:.4} <= 2 C_alpha = {:.4}", o.xi, o.sup_ratio, o.bound),
        start,
        Duration::from_secs(60),
    ));
}

#[test]
fn c08_small_time() {
    let start = Instant::now();
    let c = c_alpha(1.0);
    let p = Params {
        alpha: 1.0,
        epsilon: 0.02,
        xi: 1e3,
        k_trunc: 32,
        ..Params::default()
    };
    let o = small_time(&p, ModelVariant::Simplified, c, InitialData::spread(3), &lattice_solver()).unwrap();
    assert!(verdict(
        8,
        "small time",
        o.passed(),
        &format!("T {:.3}, sup ratio {:.4} <= 4 C_alpha = {:.4}", o.t_end, o.sup_ratio, o.bound),
        start,
        Duration::from_secs(60),
    ));
}

fn echo_params() -> Params {
    Params {
        alpha: 1.0,
        epsilon: 0.05,
        xi: 2000.0,
        ..Params::default()
    }
}

#[test]
fn c09_echo_chain() {
    let start = Instant::now();
    let o = echo_chain(&echo_params(), ModelVariant::Simplified, 10.0, 1.5, &lattice_solver()).unwrap();
    let r = &o.report;
    let worst = r.intervals.iter().map(|g| g.rho / g.bound).fold(0.0, f64::max);
    assert!(verdict(
        9,
        "echo chain",
        o.passed(),
        &format!(
            "k0 {}, max rho/bound {worst:.4}, gamma_hat {:.4} (<= {:.2}), log total {:.4}, C_fit {:.4} (<= 1.5)",
            o.k0,
            r.gamma_hat,
            2.0 * r.delta,
            r.log_total,
            r.c_fit
        ),
        start,
        Duration::from_secs(300),
    ));
}

fn long_params() -> Params {
    Params {
        alpha: 1.0,
        epsilon: 0.05,
        xi: 50.0,
        k_trunc: 16,
        ..Params::default()
    }
}

#[test]
fn c10_full_model() {
    let start = Instant::now();
    let s = lattice_solver();
    let p = echo_params();
    let simp = echo_chain(&p, ModelVariant::Simplified, 10.0, 1.5, &s).unwrap();
    let full = echo_chain(&p, ModelVariant::Full, 10.0, 1.5, &s).unwrap();
    let echo_change = (full.report.log_total - simp.report.log_total).abs() / simp.report.log_total.abs();

    let lp = long_params();
    let t_end = lp.epsilon.powi(-2);
    let ls = long_time(&lp, ModelVariant::Simplified, t_end, InitialData::spread(3), &s).unwrap();
    let lf = long_time(&lp, ModelVariant::Full, t_end, InitialData::spread(3), &s).unwrap();
    let long_ok = |o: &echo_lattice::experiment::scenarios::LongTimeOutcome| o.exponent_rest <= 0.6 && o.exponent_k1 <= 1.6;
    let long_change = (lf.log_total - ls.log_total).abs() / ls.log_total.abs().max(1e-12);

    let same = simp.passed() == full.passed() && long_ok(&ls) == long_ok(&lf);
    let ok = echo_change < 0.25 && long_change < 0.25 && same && full.passed() && long_ok(&lf);
    assert!(verdict(
        10,
        "full vs simplified",
        ok,
        &format!(
            "echo log total {:.4} -> {:.4} ({:.1}%), long-time log total {:.4} -> {:.4} ({:.1}%), verdicts preserved {same}",
            simp.report.log_total,
            full.report.log_total,
            100.0 * echo_change,
            ls.log_total,
            lf.log_total,
            100.0 * long_change
        ),
        start,
        Duration::from_secs(600),
    ));
}

#[test]
fn c11_long_time() {
    let start = Instant::now();
    let p = long_params();
    // The window (2 xi, delta/eps^2) is empty for these values; the run
    // extends to eps^-2.
    let o = long_time(&p, ModelVariant::Simplified, p.epsilon.powi(-2), InitialData::spread(3), &lattice_solver()).unwrap();
    assert!(verdict(
        11,
        "long time",
        o.exponent_rest <= 0.6 && o.exponent_k1 <= 1.6,
        &format!(
            "t in ({}, {}), exponent |k| != 1: {:.4} (<= 0.6), |k| = 1: {:.4} (<= 1.6)",
            o.t_start, o.t_end, o.exponent_rest, o.exponent_k1
        ),
        start,
        Duration::from_secs(60),
    ));
}
