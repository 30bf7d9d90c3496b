use echo_lattice::ode::Solver;
use echo_lattice::quadrature;
use echo_lattice::toy::{
    kernel_reference, legendre_energy, legendre_exponent, legendre_model, resonance_kernel_integral_with, toy_growth,
    LegendreKind, TwoModeState,
};

#[test]
fn kernel_window_100_close_to_full_line() {
    // Plain quadrature on the window alone, no tail correction.
    let q = quadrature::integrate(|s| (1.0 + s * s).powf(-0.75), -100.0, 100.0, 1e-13, 1e-13, 4000);
    let r = kernel_reference();
    assert!((q.value - r).abs() / r < 0.1, "{} vs {r}", q.value);
    let k = resonance_kernel_integral_with(100.0);
    assert!((k.value - r).abs() < 1e-9);
    assert!((k.inner - q.value).abs() < 1e-10);
}

#[test]
fn kernel_independent_of_window_after_tail() {
    let a = resonance_kernel_integral_with(40.0).value;
    let b = resonance_kernel_integral_with(400.0).value;
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn toy_ratio_example() {
    let g = toy_growth(1e4, 5, 1e-3, 1.0).unwrap();
    assert!((1.0..=10.0).contains(&g.ratio), "ratio {}", g.ratio);
    assert_eq!(toy_growth(1e4, 5, 1e-3, 0.0).unwrap().z_nr, 0.0);
}

#[test]
fn toy_ratio_approaches_kernel() {
    // k = 1, xi = 1e4: mu = 1e4, far from the endpoints the weight
    // (1+t^2)^{1/4} ~ sqrt(t) against sqrt(xi/k) makes the ratio the kernel integral.
    let g = toy_growth(1e4, 1, 1e-3, 1.0).unwrap();
    let r = kernel_reference();
    assert!((g.ratio - r).abs() / r < 0.15, "ratio {} vs {r}", g.ratio);
}

#[test]
fn legendre_zero_forcing_is_stationary() {
    let init = TwoModeState { z_r: 1.3, z_nr: 0.4, t: 0.0 };
    for kind in [LegendreKind::Envelope, LegendreKind::Signed] {
        let r = legendre_model(400.0, |_| 0.0, init, kind, &Solver::default()).unwrap();
        assert_eq!(r.final_state.z_r, 1.3);
        assert_eq!(r.final_state.z_nr, 0.4);
        assert_eq!(r.delta_nr, 0.0);
    }
}

#[test]
fn legendre_energy_inequality() {
    let init = TwoModeState { z_r: 1.0, z_nr: 0.0, t: 0.0 };
    let solver = Solver::with_tolerances(1e-10, 1e-12);
    for mu in [100.0, 1000.0] {
        for f in [0.05, 0.2] {
            let r = legendre_model(mu, |t| f * (1.0 + 0.5 * (t / mu).sin()), init, LegendreKind::Envelope, &solver).unwrap();
            assert!(r.energy_check_doubled <= 1.0 + 1e-8, "mu {mu} f {f}: {}", r.energy_check_doubled);
            assert!(r.energy_check.is_finite());
        }
    }
}

#[test]
fn legendre_energy_is_continuous_at_zero() {
    let mu = 50.0;
    let a = legendre_energy(mu, TwoModeState { z_r: 0.6, z_nr: 2.0, t: -1e-12 });
    let b = legendre_energy(mu, TwoModeState { z_r: 0.6, z_nr: 2.0, t: 0.0 });
    assert!((a - b).abs() < 1e-10);
}

#[test]
fn legendre_exponent_near_half() {
    let f = 0.01;
    let mus = [1e2, 1e3, 1e4];
    let fit = legendre_exponent(&mus, f, LegendreKind::Envelope, &Solver::with_tolerances(1e-10, 1e-12)).unwrap();
    assert!(fit.exponent >= 0.5 - 0.02 && fit.exponent <= 0.5 + 2.0 * f + 0.02, "exponent {}", fit.exponent);
    assert!(fit.r2 > 0.99);
}

#[test]
fn legendre_rejects_bad_mu() {
    let init = TwoModeState::default();
    assert!(legendre_model(0.0, |_| 1.0, init, LegendreKind::Signed, &Solver::default()).is_err());
    assert!(legendre_model(f64::NAN, |_| 1.0, init, LegendreKind::Signed, &Solver::default()).is_err());
}
