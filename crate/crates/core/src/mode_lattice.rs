//! Domain types and the Fourier symbols shared by every other module.
//!
//! All symbols use the sheared frequency `xi - k t`. Fractional powers of the
//! Laplacian are positive real powers of `k^2 + (xi - k t)^2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Scalar parameters of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub alpha: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub xi: f64,
    /// Lattice truncation: modes run over `-k_trunc..=k_trunc`.
    pub k_trunc: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Final time; `None` means `delta / epsilon^2`.
    pub t_end: Option<f64>,
    /// When set, the small-data and trusted-horizon invariants are enforced.
    pub enforce_regime: bool,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            alpha: 1.0,
            epsilon: 0.05,
            delta: 0.09,
            xi: 2000.0,
            k_trunc: 16,
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            t_end: None,
            enforce_regime: true,
        }
    }
}

impl Params {
    /// `delta * epsilon^-2`, the time scale on which the wave stays small.
    pub fn horizon(&self) -> f64 {
        self.delta / (self.epsilon * self.epsilon)
    }

    pub fn t_end(&self) -> f64 {
        self.t_end.unwrap_or_else(|| self.horizon())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(invalid("alpha", format!("must be finite and >= 0, got {}", self.alpha)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(invalid("epsilon", format!("must be positive, got {}", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta < 0.1) {
            return Err(invalid("delta", format!("must lie in (0, 0.1), got {}", self.delta)));
        }
        if !self.xi.is_finite() {
            return Err(invalid("xi", "must be finite"));
        }
        if self.k_trunc < 2 {
            return Err(invalid("k_trunc", format!("must be >= 2, got {}", self.k_trunc)));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(invalid("tolerance", "abs_tol and rel_tol must be positive"));
        }
        if let Some(t) = self.t_end {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(invalid("t_end", format!("must be finite and >= 0, got {t}")));
            }
        }
        if self.enforce_regime {
            if self.epsilon > 0.1 {
                return Err(invalid(
                    "epsilon",
                    format!("must be <= 0.1 when regime logic is enforced, got {}", self.epsilon),
                ));
            }
            let h = self.horizon();
            if self.t_end() > h * (1.0 + 1e-12) {
                return Err(invalid(
                    "t_end",
                    format!("{} exceeds delta/epsilon^2 = {h}", self.t_end()),
                ));
            }
        }
        Ok(())
    }
}

/// A Fourier mode `(k, xi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeIndex {
    pub k: i64,
    pub xi: f64,
}

impl ModeIndex {
    pub fn new(k: i64, xi: f64) -> Self {
        ModeIndex { k, xi }
    }

    /// Sheared frequency `xi - k t`.
    #[inline]
    pub fn shifted(&self, t: f64) -> f64 {
        self.xi - self.k as f64 * t
    }
}

/// Complex amplitudes of the vorticity-type and temperature-type unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ModeState {
    pub z: Complex64,
    pub q: Complex64,
}

impl ModeState {
    pub fn new(z: Complex64, q: Complex64) -> Self {
        ModeState { z, q }
    }

    pub fn real(z: f64, q: f64) -> Self {
        ModeState::new(Complex64::new(z, 0.0), Complex64::new(q, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.z.norm_sqr() + self.q.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.z.is_finite() && self.q.is_finite()
    }
}

/// Snapshot of all modes `k = -K..=K` at a fixed `xi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeState {
    pub t: f64,
    pub xi: f64,
    pub modes: Vec<ModeState>,
}

impl LatticeState {
    pub fn zeros(xi: f64, k_trunc: usize, t: f64) -> Self {
        LatticeState {
            t,
            xi,
            modes: vec![ModeState::default(); 2 * k_trunc + 1],
        }
    }

    /// Truncation `K`.
    pub fn k_trunc(&self) -> usize {
        self.modes.len() / 2
    }

    pub fn k_of(&self, i: usize) -> i64 {
        i as i64 - self.k_trunc() as i64
    }

    pub fn index(&self, k: i64) -> Option<usize> {
        let kk = self.k_trunc() as i64;
        (-kk..=kk).contains(&k).then(|| (k + kk) as usize)
    }

    pub fn mode(&self, k: i64) -> Option<&ModeState> {
        self.index(k).map(|i| &self.modes[i])
    }

    pub fn mode_mut(&mut self, k: i64) -> Option<&mut ModeState> {
        self.index(k).map(move |i| &mut self.modes[i])
    }

    pub fn norm(&self) -> f64 {
        self.modes.iter().map(ModeState::norm_sqr).sum::<f64>().sqrt()
    }

    /// l2 norm restricted to modes whose `k` satisfies `keep`.
    pub fn projected_norm(&self, keep: impl Fn(i64) -> bool) -> f64 {
        self.modes
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(self.k_of(*i)))
            .map(|(_, m)| m.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Mass on the two boundary modes relative to the total.
    pub fn tail_fraction(&self) -> f64 {
        let total = self.norm();
        if total == 0.0 {
            return 0.0;
        }
        let n = self.modes.len();
        (self.modes[0].norm_sqr() + self.modes[n - 1].norm_sqr()).sqrt() / total
    }

    pub fn to_reals(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(4 * self.modes.len());
        for m in &self.modes {
            y.extend_from_slice(&[m.z.re, m.z.im, m.q.re, m.q.im]);
        }
        y
    }

    pub fn from_reals(xi: f64, t: f64, y: &[f64]) -> Self {
        let modes = y
            .chunks_exact(4)
            .map(|c| ModeState::new(Complex64::new(c[0], c[1]), Complex64::new(c[2], c[3])))
            .collect();
        LatticeState { t, xi, modes }
    }
}

/// Resonance times and the associated intervals for a fixed `xi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalPartition {
    pub xi: f64,
    /// `times[k] = t_k` for `0 <= k <= k_max`, strictly decreasing.
    pub times: Vec<f64>,
    pub k0: u64,
    pub k1: u64,
}

impl IntervalPartition {
    pub fn t(&self, k: usize) -> f64 {
        self.times[k]
    }

    pub fn k_max(&self) -> usize {
        self.times.len() - 1
    }

    /// `I_k = (t_k, t_{k-1})` for `1 <= k <= k_max`.
    pub fn interval(&self, k: usize) -> Option<(f64, f64)> {
        (k >= 1 && k <= self.k_max()).then(|| (self.times[k], self.times[k - 1]))
    }

    /// The `k` with `t` in `I_k`, if any. Boundary points belong to the
    /// interval on their right, so the intervals tile `(t_{k_max}, t_0]`.
    pub fn locate(&self, t: f64) -> Option<usize> {
        if t <= self.times[self.k_max()] || t > self.times[0] {
            return None;
        }
        // times is decreasing: find the first k with t_k < t.
        let k = self.times.partition_point(|&tk| tk >= t);
        Some(k)
    }
}

/// Symbol of `-Delta_t`: `k^2 + (xi - k t)^2`.
#[inline]
pub fn symbol_delta_t(m: ModeIndex, t: f64) -> f64 {
    let k = m.k as f64;
    let s = m.shifted(t);
    k * k + s * s
}

/// Symbol of `L_t = d_x (d_y - t d_x) Delta_t^{-1}`, bounded by 1/2 in modulus.
#[inline]
pub fn symbol_lt(m: ModeIndex, t: f64) -> f64 {
    if m.k == 0 {
        return 0.0;
    }
    let k = m.k as f64;
    let s = m.shifted(t);
    k * s / (k * k + s * s)
}

pub fn resonance_partition(xi: f64, epsilon: f64, k_max: usize) -> Result<IntervalPartition> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(invalid("xi", format!("partition needs xi > 0, got {xi}")));
    }
    if !(epsilon > 0.0) {
        return Err(invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    if k_max < 1 {
        return Err(invalid("k_max", "must be >= 1"));
    }
    let times = (0..=k_max)
        .map(|k| {
            if k == 0 {
                2.0 * xi
            } else {
                let k = k as f64;
                0.5 * (xi / (k + 1.0) + xi / k)
            }
        })
        .collect();
    Ok(IntervalPartition {
        xi,
        times,
        k0: k0(xi, epsilon),
        k1: k1(xi, epsilon),
    })
}

/// Last resonant mode of the echo chain, `floor((eps xi)^{2/3})`.
pub fn k0(xi: f64, epsilon: f64) -> u64 {
    (epsilon * xi).powf(2.0 / 3.0).floor() as u64
}

/// `floor(eps^2 xi)`; the chain is non-empty only while this stays below `k0`.
pub fn k1(xi: f64, epsilon: f64) -> u64 {
    (epsilon * epsilon * xi).floor() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_symbol_examples() {
        assert_eq!(symbol_delta_t(ModeIndex::new(1, 0.0), 0.0), 1.0);
        assert_eq!(symbol_delta_t(ModeIndex::new(2, 10.0), 5.0), 4.0);
        assert_eq!(symbol_delta_t(ModeIndex::new(3, 6.0), 1.0), 18.0);
    }

    #[test]
    fn lt_symbol_examples() {
        assert_eq!(symbol_lt(ModeIndex::new(1, 1.0), 0.0), 0.5);
        assert_eq!(symbol_lt(ModeIndex::new(4, 10.0), 2.5), 0.0);
        assert_eq!(symbol_lt(ModeIndex::new(0, 3.0), 7.0), 0.0);
    }

    #[test]
    fn partition_examples() {
        let p = resonance_partition(100.0, 0.05, 6).unwrap();
        assert_eq!(p.t(0), 200.0);
        assert!((p.t(5) - 18.333333333333332).abs() < 1e-12);
        let p = resonance_partition(1e4, 0.01, 3).unwrap();
        assert_eq!(p.k0, 21);
        assert_eq!(p.k1, 1);
        assert!(resonance_partition(0.0, 0.01, 3).is_err());
    }

    #[test]
    fn locate_matches_intervals() {
        let p = resonance_partition(1e4, 0.01, 30).unwrap();
        assert_eq!(p.locate(1e4 / 7.0), Some(7));
        assert_eq!(p.locate(p.t(0)), Some(1));
        assert_eq!(p.locate(p.t(0) + 1.0), None);
        for k in 1..=30 {
            let (a, b) = p.interval(k).unwrap();
            assert_eq!(p.locate(0.5 * (a + b)), Some(k));
            assert_eq!(p.locate(b), Some(k));
        }
    }

    #[test]
    fn lattice_indexing_roundtrip() {
        let mut s = LatticeState::zeros(5.0, 3, 0.0);
        *s.mode_mut(-3).unwrap() = ModeState::real(1.0, 0.0);
        *s.mode_mut(2).unwrap() = ModeState::new(Complex64::new(0.0, 2.0), Complex64::new(1.0, 1.0));
        assert_eq!(s.index(-3), Some(0));
        assert_eq!(s.index(4), None);
        let back = LatticeState::from_reals(5.0, 0.0, &s.to_reals());
        assert_eq!(back, s);
        assert!((s.norm() - 7f64.sqrt()).abs() < 1e-15);
        assert!(s.tail_fraction() > 0.0);
    }

    #[test]
    fn params_validation() {
        let p = Params::default();
        p.validate().unwrap();
        assert!(Params { epsilon: 0.3, ..p }.validate().is_err());
        Params { epsilon: 0.3, enforce_regime: false, ..p }.validate().unwrap();
        assert!(Params { t_end: Some(1e6), ..p }.validate().is_err());
        assert!(Params { k_trunc: 1, ..p }.validate().is_err());
        assert!(Params { delta: 0.1, ..p }.validate().is_err());
    }
}
