use echo_lattice::coupled::{integrate_lattice, ModelVariant, RecordSpec};
use echo_lattice::growth::{
    cascade_scale, fit_stirling_constant, growth_product, per_interval_growth, regime_classify, resonant_index, stirling_bounds,
    GevreyWeight, Regime, RegimeThresholds,
};
use echo_lattice::mode_lattice::{resonance_partition, LatticeState, ModeState, Params};
use echo_lattice::ode::Solver;
use echo_lattice::wave::NoWave;

fn naive_log_product(xi: f64, eps: f64) -> f64 {
    if xi >= eps.powi(-4) {
        return 0.0;
    }
    let mut p = 1.0f64;
    let mut k = 1u64;
    while (k as f64) <= (eps * xi).powf(2.0 / 3.0) {
        if (k as f64) >= xi * eps * eps {
            p *= eps * xi / (k as f64).powf(1.5);
        }
        k += 1;
    }
    p.ln()
}

#[test]
fn log_product_matches_naive() {
    for (xi, eps) in [(1e3, 0.05), (1e4, 0.01), (5e4, 0.02), (2e5, 0.05), (1e6, 0.001)] {
        let g = growth_product(xi, eps).unwrap();
        let n = naive_log_product(xi, eps);
        assert!((g.log_g - n).abs() < 1e-9 * n.abs().max(1.0), "{xi} {eps}: {} vs {n}", g.log_g);
    }
}

#[test]
fn empty_product_is_one() {
    let g = growth_product(1e4 + 1.0, 0.1 - 1e-9).unwrap();
    assert_eq!(g.log_g, 0.0);
    assert!(growth_product(10.0, 0.1).is_err());
    assert!(growth_product(10.0, 0.0).is_err());
    assert!(growth_product(-1.0, 0.01).is_err());
}

#[test]
fn stirling_sigma_two() {
    // xi = eps^-2 sits in the middle of the Gevrey-2/3 window.
    let pts: Vec<(f64, f64)> = [0.001, 0.002, 0.005, 0.01].iter().map(|&e: &f64| (e.powi(-2), e)).collect();
    let log_c = fit_stirling_constant(&pts).unwrap();
    for &(xi, eps) in &pts {
        let s = stirling_bounds(xi, eps, log_c).unwrap();
        assert!(s.upper_ok, "{xi}");
        assert!(s.lower_ok, "{xi}: {} < {}", s.log_g, s.lower_log);
    }
}

#[test]
fn gevrey_example() {
    let w = GevreyWeight { c: 1.0, gamma: 0.0, epsilon: 0.1 };
    assert!((w.log_weight(1e3) - 100f64.powf(2.0 / 3.0)).abs() < 1e-12);
    assert!((w.log_weight(1e3) - 21.54).abs() < 5e-3);
    assert!((cascade_scale(1e3, 0.1) - w.log_weight(1e3)).abs() < 1e-12);
    assert_eq!(w.log_weight(1e12), w.log_cap());
}

#[test]
fn regime_thresholds_and_labels() {
    let th = RegimeThresholds::new(1e4, 0.01, 2.0);
    assert_eq!(th.long_time, 2e4);
    assert!((th.high_frequency - 4e8).abs() < 1e-3);
    assert_eq!(regime_classify(1e4, 0.01, 3e4, 2.0), Regime::LongTime);
    assert_eq!(regime_classify(1e9, 0.01, 10.0, 2.0), Regime::HighFrequencyUniform);
    assert_eq!(regime_classify(1e4, 0.01, 1.0, 2.0), Regime::SmallTime);
    assert_eq!(regime_classify(1e4, 0.01, 1e4 / 3.0, 2.0), Regime::ResonantInterval(3));
    assert_eq!(resonant_index(1e4, 2e4), 1);
}

#[test]
fn unit_growth_without_wave() {
    let xi = 300.0;
    let part = resonance_partition(xi, 0.05, 8).unwrap();
    // The partition needs eps > 0; the wave itself is switched off.
    let p = Params { xi, k_trunc: 8, epsilon: 0.05, enforce_regime: false, ..Params::default() };
    let mut s = LatticeState::zeros(xi, 8, part.t(5));
    *s.mode_mut(5).unwrap() = ModeState::real(1.0, 0.0);
    let run = integrate_lattice(
        ModelVariant::Full,
        &p,
        &s,
        (part.t(5), part.t(0)),
        &RecordSpec::default(),
        &NoWave,
        &Solver::with_tolerances(1e-10, 1e-12),
    )
    .unwrap();
    let rep = per_interval_growth(&run.records, &part, 5, 1, 0.05, 0.1, 10.0).unwrap();
    for g in &rep.intervals {
        assert!((0.5..=2.0).contains(&g.rho), "k {}: rho {}", g.k, g.rho);
    }
    assert!(rep.telescoping_error() < 1e-10);
    assert!(per_interval_growth(&run.records, &part, 9, 1, 0.05, 0.1, 10.0).is_err());
}
