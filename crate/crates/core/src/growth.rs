//! Growth bookkeeping: the combinatorial product of echo factors, Gevrey
//! weights, regime classification and per-interval inflation reports.
//!
//! Everything that can get large is kept in log space.

use serde::{Deserialize, Serialize};

use crate::coupled::NormRecord;
use crate::error::{Error, Result};
use crate::mode_lattice::IntervalPartition;
use crate::special::{compensated_sum, fit_line, logsumexp};

/// `(eps xi)^{2/3}`, the exponent scale of the echo cascade.
pub fn cascade_scale(xi: f64, epsilon: f64) -> f64 {
    (epsilon * xi.abs()).powf(2.0 / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthProduct {
    pub xi: f64,
    pub epsilon: f64,
    /// Inclusive range of `k`; empty when `k_lo > k_hi`.
    pub k_lo: u64,
    pub k_hi: u64,
    pub log_g: f64,
}

impl GrowthProduct {
    pub fn terms(&self) -> u64 {
        (self.k_hi + 1).saturating_sub(self.k_lo)
    }
}

/// `G(xi, eps) = prod eps xi / k^{3/2}` over `xi eps^2 <= k <= (eps xi)^{2/3}`,
/// `k >= 1`, as a logarithm. The product is empty (G = 1) once `xi >= eps^-4`.
pub fn growth_product(xi: f64, epsilon: f64) -> Result<GrowthProduct> {
    if !(epsilon > 0.0 && epsilon < 0.1) {
        return Err(Error::Domain(format!("growth product needs 0 < eps < 0.1, got {epsilon}")));
    }
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::Domain(format!("growth product needs xi > 0, got {xi}")));
    }
    let empty = GrowthProduct { xi, epsilon, k_lo: 1, k_hi: 0, log_g: 0.0 };
    if xi >= epsilon.powi(-4) {
        return Ok(empty);
    }
    let k_lo = ((xi * epsilon * epsilon).ceil() as u64).max(1);
    let k_hi = cascade_scale(xi, epsilon).floor() as u64;
    if k_lo > k_hi {
        return Ok(GrowthProduct { k_lo, k_hi, ..empty });
    }
    let le = (epsilon * xi).ln();
    let log_g = compensated_sum((k_lo..=k_hi).map(|k| le - 1.5 * (k as f64).ln()));
    Ok(GrowthProduct { xi, epsilon, k_lo, k_hi, log_g })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StirlingCheck {
    pub xi: f64,
    pub epsilon: f64,
    pub log_g: f64,
    /// `(eps xi)^{2/3}`.
    pub scale: f64,
    /// `log C + 1.5 scale`.
    pub upper_log: f64,
    /// `0.1 scale`.
    pub lower_log: f64,
    pub upper_ok: bool,
    pub lower_ok: bool,
}

/// Compare `log G` with `log C + 1.5 (eps xi)^{2/3}` and `0.1 (eps xi)^{2/3}`.
pub fn stirling_bounds(xi: f64, epsilon: f64, log_c: f64) -> Result<StirlingCheck> {
    let g = growth_product(xi, epsilon)?;
    let scale = cascade_scale(xi, epsilon);
    let upper_log = log_c + 1.5 * scale;
    let lower_log = 0.1 * scale;
    Ok(StirlingCheck {
        xi,
        epsilon,
        log_g: g.log_g,
        scale,
        upper_log,
        lower_log,
        // A fitted constant is attained exactly at its maximizing point.
        upper_ok: g.log_g <= upper_log + 1e-12 * upper_log.abs().max(1.0),
        lower_ok: g.log_g >= lower_log,
    })
}

/// Smallest `log C` with `log G <= log C + 1.5 (eps xi)^{2/3}` on all points.
pub fn fit_stirling_constant(points: &[(f64, f64)]) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for &(xi, eps) in points {
        let g = growth_product(xi, eps)?;
        best = best.max(g.log_g - 1.5 * cascade_scale(xi, eps));
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevreyWeight {
    pub c: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

impl GevreyWeight {
    /// `C min((eps |xi|^{1+gamma})^{2/3 - 2 gamma}, eps^-2)`.
    pub fn log_weight(&self, xi: f64) -> f64 {
        let e = self.epsilon;
        let inner = (e * xi.abs().powf(1.0 + self.gamma)).powf(2.0 / 3.0 - 2.0 * self.gamma);
        self.c * inner.min(1.0 / (e * e))
    }

    pub fn weight(&self, xi: f64) -> f64 {
        self.log_weight(xi).exp()
    }

    /// `1 + eps^-2 / |xi|`.
    pub fn prefactor(&self, xi: f64) -> f64 {
        1.0 + 1.0 / (self.epsilon * self.epsilon * xi.abs())
    }

    /// Log of the full bound `prefactor * weight`.
    pub fn log_bound(&self, xi: f64) -> f64 {
        self.log_weight(xi) + self.prefactor(xi).ln()
    }

    /// Log of the capped value `exp(C eps^-2)`.
    pub fn log_cap(&self) -> f64 {
        self.c / (self.epsilon * self.epsilon)
    }
}

/// `ln sqrt(sum_xi (w(xi) norm(xi))^2)` over `(xi, norm)` pairs.
pub fn log_weighted_norm(samples: &[(f64, f64)], weight: &GevreyWeight) -> f64 {
    let terms: Vec<f64> = samples
        .iter()
        .filter(|(_, n)| *n > 0.0)
        .map(|&(xi, n)| 2.0 * (weight.log_weight(xi) + n.ln()))
        .collect();
    0.5 * logsumexp(&terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    HighFrequencyUniform,
    SmallTime,
    ResonantInterval(u64),
    LongTime,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::HighFrequencyUniform => write!(f, "high-frequency"),
            Regime::SmallTime => write!(f, "small-time"),
            Regime::ResonantInterval(k) => write!(f, "resonant({k})"),
            Regime::LongTime => write!(f, "long-time"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    /// `T` with `eps T^{3/2} xi^{-1/2} = 1/(4 C_alpha)`.
    pub small_time: f64,
    /// `2 C_alpha eps^-4`.
    pub high_frequency: f64,
    /// `2 xi`.
    pub long_time: f64,
}

impl RegimeThresholds {
    pub fn new(xi: f64, epsilon: f64, c_alpha: f64) -> Self {
        RegimeThresholds {
            small_time: (xi.abs().sqrt() / (4.0 * c_alpha * epsilon)).powf(2.0 / 3.0),
            high_frequency: 2.0 * c_alpha * epsilon.powi(-4),
            long_time: 2.0 * xi.abs(),
        }
    }
}

/// The `k >= 1` with `t_k < t <= t_{k-1}`, for `0 < t <= 2 xi`.
pub fn resonant_index(xi: f64, t: f64) -> u64 {
    let tk = |k: u64| {
        let k = k as f64;
        0.5 * (xi / (k + 1.0) + xi / k)
    };
    let mut k = ((xi / t).floor() as u64).max(1);
    while k > 1 && tk(k - 1) < t {
        k -= 1;
    }
    while tk(k) >= t {
        k += 1;
    }
    k
}

pub fn regime_classify(xi: f64, epsilon: f64, t: f64, c_alpha: f64) -> Regime {
    let th = RegimeThresholds::new(xi, epsilon, c_alpha);
    let xi = xi.abs();
    if xi > th.high_frequency {
        Regime::HighFrequencyUniform
    } else if t > th.long_time {
        Regime::LongTime
    } else if t <= th.small_time || t <= 0.0 || xi == 0.0 {
        Regime::SmallTime
    } else {
        Regime::ResonantInterval(resonant_index(xi, t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalGrowth {
    pub k: u64,
    pub t_start: f64,
    pub t_end: f64,
    pub rho: f64,
    /// `eps xi / k^{3/2}`.
    pub predicted: f64,
    /// `bound_constant * predicted * (xi/k^2)^{gamma_hat}`.
    pub bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub xi: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub intervals: Vec<IntervalGrowth>,
    pub gamma_hat: f64,
    pub c_hat: f64,
    pub bound_constant: f64,
    pub log_total: f64,
    /// `ln(norm(t_end) / norm(t_start))` taken directly from the records.
    pub log_end_to_end: f64,
    /// `log_total / (eps xi)^{2/3}`.
    pub c_fit: f64,
    pub intervals_ok: bool,
    pub gamma_ok: bool,
}

impl GrowthReport {
    pub fn telescoping_error(&self) -> f64 {
        (self.log_total.exp() - self.log_end_to_end.exp()).abs() / self.log_end_to_end.exp()
    }
}

fn find(records: &[NormRecord], t: f64) -> Result<&NormRecord> {
    records
        .iter()
        .find(|r| (r.t - t).abs() <= 1e-12 * t.abs().max(1.0))
        .ok_or(Error::MissingPartitionSample(t))
}

/// Per-interval factors `rho_k = |state(t_{k-1})| / |state(t_k)|` for
/// `k = k_hi` down to `k_lo`, with `(C, gamma)` fitted by regressing
/// `ln(rho_k / (eps xi k^{-3/2}))` on `ln(xi / k^2)`. Each interval passes
/// when `rho_k <= bound_constant * eps xi k^{-3/2} (xi/k^2)^{gamma_hat}`.
pub fn per_interval_growth(
    records: &[NormRecord],
    partition: &IntervalPartition,
    k_hi: u64,
    k_lo: u64,
    epsilon: f64,
    delta: f64,
    bound_constant: f64,
) -> Result<GrowthReport> {
    if k_lo < 1 || k_hi < k_lo || k_hi as usize > partition.k_max() {
        return Err(Error::Domain(format!(
            "interval range {k_lo}..={k_hi} outside the partition (k_max = {})",
            partition.k_max()
        )));
    }
    let xi = partition.xi;
    let mut intervals = Vec::new();
    for k in (k_lo..=k_hi).rev() {
        let (a, b) = partition.interval(k as usize).expect("checked range");
        let ra = find(records, a)?;
        let rb = find(records, b)?;
        let kf = k as f64;
        intervals.push(IntervalGrowth {
            k,
            t_start: a,
            t_end: b,
            rho: rb.norm / ra.norm,
            predicted: epsilon * xi / kf.powf(1.5),
            bound: f64::NAN,
            ok: false,
        });
    }
    let mus: Vec<f64> = intervals.iter().map(|g| (xi / (g.k as f64).powi(2)).ln()).collect();
    let ys: Vec<f64> = intervals.iter().map(|g| (g.rho / g.predicted).ln()).collect();
    let (gamma_hat, c_hat) = match fit_line(&mus, &ys) {
        Some(fit) => (fit.slope, fit.intercept.exp()),
        // A single interval fixes only the constant.
        None => (0.0, ys.first().map_or(1.0, |y| y.exp())),
    };
    for (g, lm) in intervals.iter_mut().zip(&mus) {
        g.bound = bound_constant * g.predicted * (gamma_hat * lm).exp();
        g.ok = g.rho <= g.bound;
    }
    let log_total = compensated_sum(intervals.iter().map(|g| g.rho.ln()));
    let first = find(records, partition.t(k_hi as usize))?;
    let last = find(records, partition.t(k_lo as usize - 1))?;
    let log_end_to_end = (last.norm / first.norm).ln();
    let scale = cascade_scale(xi, epsilon);
    Ok(GrowthReport {
        xi,
        epsilon,
        delta,
        intervals_ok: intervals.iter().all(|g| g.ok),
        intervals,
        gamma_hat,
        c_hat,
        bound_constant,
        log_total,
        log_end_to_end,
        c_fit: log_total / scale,
        gamma_ok: gamma_hat <= 2.0 * delta,
    })
}

/// Log-log slope of `values` against `times`.
pub fn fit_power_law(times: &[f64], values: &[f64]) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(t, v)| **t > 0.0 && **v > 0.0)
        .map(|(t, v)| (t.ln(), v.ln()))
        .unzip();
    fit_line(&x, &y).map(|f| f.slope)
}

/// Label every sample time; used for the regime column of reports.
pub fn label_times(xi: f64, epsilon: f64, c_alpha: f64, times: &[f64]) -> Vec<Regime> {
    times.iter().map(|&t| regime_classify(xi, epsilon, t, c_alpha)).collect()
}

/// Partition-consistent check used by reports: the resonant index agrees
/// with [`IntervalPartition::locate`].
pub fn resonant_index_matches(partition: &IntervalPartition, t: f64) -> bool {
    match partition.locate(t) {
        Some(k) => resonant_index(partition.xi, t) == k as u64,
        None => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode_lattice::resonance_partition;

    #[test]
    fn empty_product_above_threshold() {
        let g = growth_product(1e8 + 1.0, 0.01).unwrap();
        assert_eq!(g.log_g, 0.0);
        assert_eq!(g.terms(), 0);
        assert!(growth_product(10.0, 0.1).is_err());
    }

    #[test]
    fn product_range_example() {
        let g = growth_product(1e4, 0.01).unwrap();
        assert_eq!((g.k_lo, g.k_hi), (1, 21));
        let naive: f64 = (1..=21).map(|k| 100.0 / (k as f64).powf(1.5)).product();
        assert!((g.log_g - naive.ln()).abs() < 1e-12);
    }

    #[test]
    fn weight_examples() {
        let w = GevreyWeight { c: 1.0, gamma: 0.0, epsilon: 0.1 };
        assert!((w.log_weight(1e3) - 100f64.powf(2.0 / 3.0)).abs() < 1e-12);
        assert!((w.log_weight(1e12) - 100.0).abs() < 1e-12);
        assert!((w.log_cap() - 100.0).abs() < 1e-12);
    }

    #[test]
    fn regime_examples() {
        let c = 2.0;
        assert_eq!(regime_classify(1e4, 1e-2, 1e4 / 7.0, c), Regime::ResonantInterval(7));
        assert_eq!(regime_classify(1e4, 1e-2, 2.1e4, c), Regime::LongTime);
        assert_eq!(regime_classify(1e9, 1e-2, 5.0, c), Regime::HighFrequencyUniform);
        assert_eq!(regime_classify(1e4, 1e-2, 1.0, c), Regime::SmallTime);
    }

    #[test]
    fn resonant_index_agrees_with_partition() {
        let p = resonance_partition(3000.0, 0.01, 200).unwrap();
        for i in 1..2000 {
            let t = 15.0 + i as f64 * 3.0;
            if t <= p.t(0) {
                assert!(resonant_index_matches(&p, t), "t = {t}");
            }
        }
    }

    #[test]
    fn growth_report_telescopes() {
        let p = resonance_partition(400.0, 0.05, 6).unwrap();
        let records: Vec<NormRecord> = (0..=6)
            .map(|k| NormRecord {
                t: p.t(k),
                norm: 1.0 + (6 - k) as f64 * 0.7,
                energy_norm: f64::NAN,
                norm_k1: 0.0,
                norm_rest: 0.0,
                tail_fraction: 0.0,
            })
            .collect();
        let r = per_interval_growth(&records, &p, 6, 1, 0.05, 0.09, 10.0).unwrap();
        assert_eq!(r.intervals.len(), 6);
        assert!(r.telescoping_error() < 1e-12);
        assert!(per_interval_growth(&records[1..], &p, 6, 1, 0.05, 0.09, 10.0).is_err());
    }
}
