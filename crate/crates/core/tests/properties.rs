use echo_lattice::coupled::{lattice_rhs, ModelVariant};
use echo_lattice::experiment::output::{read_table, write_table};
use echo_lattice::experiment::ExperimentConfig;
use echo_lattice::growth::{regime_classify, resonant_index_matches, GevreyWeight, Regime, RegimeThresholds};
use echo_lattice::homogeneous::homogeneous_rhs;
use echo_lattice::mode_lattice::{k0, k1, resonance_partition, symbol_lt, LatticeState, ModeIndex, ModeState};
use echo_lattice::wave::WaveSource;
use echo_lattice::Complex64;
use proptest::prelude::*;

struct Constant(f64, f64);

impl WaveSource for Constant {
    fn fg(&self, _t: f64) -> (f64, f64) {
        (self.0, self.1)
    }
}

fn state(xi: f64, k_trunc: usize, t: f64, vals: &[f64]) -> LatticeState {
    let mut s = LatticeState::zeros(xi, k_trunc, t);
    for (i, m) in s.modes.iter_mut().enumerate() {
        let v = &vals[4 * i..4 * i + 4];
        *m = ModeState::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]));
    }
    s
}

proptest! {
    #[test]
    fn lt_symbol_bounded(k in -50i64..50, xi in -1e4f64..1e4, t in 0.0f64..1e4) {
        prop_assert!(symbol_lt(ModeIndex::new(k, xi), t).abs() <= 0.5 + 1e-15);
    }

    #[test]
    fn partition_is_decreasing(xi in 1.0f64..1e6, eps in 1e-4f64..0.1, k_max in 1usize..200) {
        let p = resonance_partition(xi, eps, k_max).unwrap();
        prop_assert_eq!(p.t(0), 2.0 * xi);
        for k in 1..=p.k_max() {
            prop_assert!(p.t(k) < p.t(k - 1));
            let c = xi / k as f64;
            prop_assert!(p.t(k) < c && c < p.t(k - 1));
        }
    }

    #[test]
    fn located_interval_matches(xi in 10.0f64..1e5, frac in 0.001f64..1.0) {
        let p = resonance_partition(xi, 0.01, 400).unwrap();
        let t = frac * 2.0 * xi;
        prop_assert!(resonant_index_matches(&p, t));
        if let Some(k) = p.locate(t) {
            let (a, b) = p.interval(k).unwrap();
            prop_assert!(a < t && t <= b);
        }
    }

    #[test]
    fn chain_nonempty_below_threshold(eps in 1e-3f64..0.1, frac in 1e-3f64..1.0) {
        let xi = frac * eps.powi(-4);
        prop_assert!(k1(xi, eps) <= k0(xi, eps));
    }

    #[test]
    fn weight_monotone_up_to_cap(c in 0.01f64..2.0, gamma in 0.0f64..0.3, eps in 1e-3f64..0.1, a in 1.0f64..1e8, r in 1.0f64..100.0) {
        let w = GevreyWeight { c, gamma, epsilon: eps };
        let (x, y) = (w.log_weight(a), w.log_weight(a * r));
        prop_assert!(y >= x * (1.0 - 1e-12));
        prop_assert!(y <= w.log_cap() * (1.0 + 1e-12));
    }

    #[test]
    fn regimes_partition_time(xi in 1.0f64..1e9, eps in 1e-3f64..0.09, t in 0.0f64..1e9, c in 1.0f64..3.0) {
        let th = RegimeThresholds::new(xi, eps, c);
        let r = regime_classify(xi, eps, t, c);
        match r {
            Regime::HighFrequencyUniform => prop_assert!(xi > th.high_frequency),
            Regime::LongTime => prop_assert!(xi <= th.high_frequency && t > th.long_time),
            Regime::SmallTime => prop_assert!(t <= th.small_time || t <= th.long_time),
            Regime::ResonantInterval(k) => {
                prop_assert!(t > th.small_time && t <= th.long_time);
                let kf = k as f64;
                prop_assert!(0.5 * (xi / (kf + 1.0) + xi / kf) < t);
                if k > 1 {
                    prop_assert!(t <= 0.5 * (xi / kf + xi / (kf - 1.0)));
                }
            }
        }
    }

    #[test]
    fn lattice_rhs_is_linear(
        a in prop::collection::vec(-1.0f64..1.0, 20),
        b in prop::collection::vec(-1.0f64..1.0, 20),
        lam in -3.0f64..3.0,
        t in 0.0f64..200.0,
        f in -0.1f64..0.1,
    ) {
        let (sa, sb) = (state(60.0, 2, t, &a), state(60.0, 2, t, &b));
        let mut sc = sa.clone();
        for (m, n) in sc.modes.iter_mut().zip(&sb.modes) {
            m.z += lam * n.z;
            m.q += lam * n.q;
        }
        let w = Constant(f, 0.5 * f);
        for v in [ModelVariant::Simplified, ModelVariant::Full] {
            let (da, db, dc) = (lattice_rhs(v, 1.0, &sa, &w), lattice_rhs(v, 1.0, &sb, &w), lattice_rhs(v, 1.0, &sc, &w));
            for i in 0..da.modes.len() {
                let z = da.modes[i].z + lam * db.modes[i].z - dc.modes[i].z;
                let q = da.modes[i].q + lam * db.modes[i].q - dc.modes[i].q;
                prop_assert!(z.norm() + q.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn homogeneous_rate_identity(
        k in 1i64..20, xi in -500.0f64..500.0, t in 0.0f64..100.0, alpha in 0.0f64..10.0,
        v in prop::collection::vec(-2.0f64..2.0, 4),
    ) {
        let m = ModeIndex::new(k, xi);
        let s = ModeState::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]));
        let d = homogeneous_rhs(alpha, m, t, s);
        let rate = 2.0 * (s.z.conj() * d.z + s.q.conj() * d.q).re;
        let want = symbol_lt(m, t) * (s.z.norm_sqr() - s.q.norm_sqr());
        prop_assert!((rate - want).abs() < 1e-12 * (1.0 + s.norm_sqr()));
    }

    #[test]
    fn csv_roundtrip(rows in prop::collection::vec(prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 3), 0..20)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_table(&path, &["a", "b", "c"], rows.clone()).unwrap();
        let (header, back) = read_table(&path).unwrap();
        prop_assert_eq!(header, vec!["a".to_string(), "b".into(), "c".into()]);
        prop_assert_eq!(back, rows);
    }

    #[test]
    fn config_parse_never_panics(text in "\\PC{0,200}") {
        let _ = ExperimentConfig::parse(&text);
    }

    #[test]
    fn config_with_random_values_never_panics(
        key in prop::sample::select(vec!["alpha", "epsilon", "xi", "k_trunc", "t_end", "delta", "rel_tol"]),
        value in prop::sample::select(vec!["-1", "0", "1e400", "nan", "\"x\"", "[]", "3"]),
    ) {
        let text = format!("kind = \"lattice\"\n[params]\n{key} = {value}\n");
        if let Ok(cfg) = ExperimentConfig::parse(&text) {
            let _ = cfg.validate();
        }
    }
}
