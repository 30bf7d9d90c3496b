//! Nearest-neighbour coupled lattice of Fourier modes at fixed `xi`.
//!
//! The traveling wave couples mode `k` to `k ± 1`. In the simplified model
//! the coupling feeds `Z_{k±1}` into both equations of mode `k`:
//!
//! ```text
//! Z_k' = A_k(Z_k, Q_k) + c_k^+ Z_{k+1} + c_k^- Z_{k-1}
//! Q_k' = A_k(Z_k, Q_k) + d_k^+ Z_{k+1} + d_k^- Z_{k-1}
//! ```
//!
//! where `A_k` is the homogeneous per-mode operator. The full model adds the
//! transport corrections `h_k^± Z_{k±1}` to the `Z` equation and
//! `g_k^± Q_{k±1}` to the `Q` equation.
//!
//! Coefficients are the symbol products of the underlying operators with
//! `D_k = k^2 + (xi - k t)^2` and `|k|^{±1/2}` replaced by 1 on the x-average:
//!
//! ```text
//! c_k^± = ± f xi/2 |k|^{1/2} D_k^{-1/4} |k±1|^{-1/2} D_{k±1}^{-3/4}
//! d_k^± = ± g xi/2 |k|^{-1/2} D_k^{1/4} |k±1|^{-1/2} D_{k±1}^{-3/4}
//! g_k^± = ± f xi / (2(1+t^2)) D_k^{1/4} D_{k±1}^{-1/4}
//! h_k^± = ± f xi / (2(1+t^2)) D_k^{-1/4} D_{k±1}^{1/4}
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homogeneous::mode_energy;
use crate::mode_lattice::{resonance_partition, symbol_delta_t, symbol_lt, LatticeState, ModeIndex, Params};
use crate::ode::{Solver, Stats};
use crate::wave::WaveSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelVariant {
    Simplified,
    Full,
}

impl std::str::FromStr for ModelVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "simplified" => Ok(ModelVariant::Simplified),
            "full" => Ok(ModelVariant::Full),
            other => Err(format!("unknown model variant `{other}` (expected simplified|full)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn step(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// All coupling coefficients of mode `k` at one time.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CouplingCoefficients {
    pub c_plus: f64,
    pub c_minus: f64,
    pub d_plus: f64,
    pub d_minus: f64,
    pub g_plus: f64,
    pub g_minus: f64,
    pub h_plus: f64,
    pub h_minus: f64,
}

impl CouplingCoefficients {
    pub fn at(k: i64, xi: f64, t: f64, f: f64, g: f64) -> Self {
        let (c_plus, d_plus) = coeff_simplified(k, Sign::Plus, xi, t, f, g);
        let (c_minus, d_minus) = coeff_simplified(k, Sign::Minus, xi, t, f, g);
        let (g_plus, h_plus) = coeff_full_extra(k, Sign::Plus, xi, t, f);
        let (g_minus, h_minus) = coeff_full_extra(k, Sign::Minus, xi, t, f);
        CouplingCoefficients {
            c_plus,
            c_minus,
            d_plus,
            d_minus,
            g_plus,
            g_minus,
            h_plus,
            h_minus,
        }
    }
}

#[inline]
fn abs_k(k: i64) -> f64 {
    if k == 0 {
        1.0
    } else {
        k.unsigned_abs() as f64
    }
}

/// `(c_k^±, d_k^±)` of the simplified model.
pub fn coeff_simplified(k: i64, sign: Sign, xi: f64, t: f64, f: f64, g: f64) -> (f64, f64) {
    let kn = k + sign.step();
    let dk = symbol_delta_t(ModeIndex::new(k, xi), t);
    let dn = symbol_delta_t(ModeIndex::new(kn, xi), t);
    let s = sign.value() * 0.5 * xi;
    let neighbour = abs_k(kn).powf(-0.5) * dn.powf(-0.75);
    let c = s * f * abs_k(k).sqrt() * dk.powf(-0.25) * neighbour;
    let d = s * g * abs_k(k).powf(-0.5) * dk.powf(0.25) * neighbour;
    (c, d)
}

/// The coefficients written in normalized variables `xi/k - t`:
///
/// `c = ± f xi/2 (1+(xi/k-t)^2)^{-1/4} (1+(xi/(k±1)-t)^2)^{-3/4}` and
/// `d = ± g xi/2 k/(k±1) (1+(xi/k-t)^2)^{1/4} (1+(xi/(k±1)-t)^2)^{-3/4}`.
///
/// These differ from [`coeff_simplified`] by powers of `k` and `k±1`
/// (`c` by exactly `(k±1)^2`); kept for comparison only. Fails when `k` or
/// `k±1` vanishes.
pub fn coeff_simplified_printed(k: i64, sign: Sign, xi: f64, t: f64, f: f64, g: f64) -> Result<(f64, f64)> {
    let kn = k + sign.step();
    if k == 0 || kn == 0 {
        return Err(Error::Domain(format!(
            "normalized coefficients are undefined for k = {k}, k{:+} = {kn}",
            sign.step()
        )));
    }
    let (kf, knf) = (k as f64, kn as f64);
    let u = xi / kf - t;
    let un = xi / knf - t;
    let s = sign.value() * 0.5 * xi;
    let c = s * f * (1.0 + u * u).powf(-0.25) * (1.0 + un * un).powf(-0.75);
    let d = s * g * (kf / knf) * (1.0 + u * u).powf(0.25) * (1.0 + un * un).powf(-0.75);
    Ok((c, d))
}

/// `(g_k^±, h_k^±)` of the full model.
pub fn coeff_full_extra(k: i64, sign: Sign, xi: f64, t: f64, f: f64) -> (f64, f64) {
    let kn = k + sign.step();
    let dk = symbol_delta_t(ModeIndex::new(k, xi), t);
    let dn = symbol_delta_t(ModeIndex::new(kn, xi), t);
    let s = sign.value() * f * xi / (2.0 * (1.0 + t * t));
    let r = (dk / dn).powf(0.25);
    (s * r, s / r)
}

/// Right-hand side of the lattice on the flat real layout
/// `[Re Z_k, Im Z_k, Re Q_k, Im Q_k]` for `k = -K..=K`.
#[derive(Debug, Clone)]
pub struct LatticeModel {
    pub alpha: f64,
    pub xi: f64,
    pub k_trunc: usize,
    pub variant: ModelVariant,
    // Scratch buffers indexed like the modes.
    q: Vec<f64>,
    abs_sqrt: Vec<f64>,
}

impl LatticeModel {
    pub fn new(alpha: f64, xi: f64, k_trunc: usize, variant: ModelVariant) -> Self {
        let n = 2 * k_trunc + 1;
        let abs_sqrt = (0..n).map(|i| abs_k(i as i64 - k_trunc as i64).sqrt()).collect();
        LatticeModel {
            alpha,
            xi,
            k_trunc,
            variant,
            q: vec![0.0; n],
            abs_sqrt,
        }
    }

    pub fn len(&self) -> usize {
        2 * self.k_trunc + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Evaluate the derivative for wave amplitudes `(f, g)` at time `t`.
    pub fn eval(&mut self, t: f64, f: f64, g: f64, y: &[f64], dy: &mut [f64]) {
        let n = self.len();
        let kk = self.k_trunc as i64;
        let sa = self.alpha.sqrt();
        for i in 0..n {
            let k = i as i64 - kk;
            let d = symbol_delta_t(ModeIndex::new(k, self.xi), t);
            // D^{1/4}
            self.q[i] = d.sqrt().sqrt();
        }
        let half_xi = 0.5 * self.xi;
        let transport = f * self.xi / (2.0 * (1.0 + t * t));
        let coupled = f != 0.0 || g != 0.0;
        for i in 0..n {
            let k = i as i64 - kk;
            let m = ModeIndex::new(k, self.xi);
            let o = 4 * i;
            let z = Complex64::new(y[o], y[o + 1]);
            let qv = Complex64::new(y[o + 2], y[o + 3]);
            let half_m = 0.5 * symbol_lt(m, t);
            let b = if k == 0 {
                0.0
            } else {
                sa * k as f64 / (self.q[i] * self.q[i])
            };
            let ib = Complex64::new(0.0, b);
            let mut dz = half_m * z - ib * qv;
            let mut dq = -ib * z - half_m * qv;

            if coupled {
                let qk = self.q[i];
                for (nb, sgn) in [(i + 1, 1.0), (i.wrapping_sub(1), -1.0)] {
                    if nb >= n {
                        continue;
                    }
                    let on = 4 * nb;
                    let zn = Complex64::new(y[on], y[on + 1]);
                    let qn = self.q[nb];
                    // |k±1|^{-1/2} D_{k±1}^{-3/4}
                    let w = 1.0 / (self.abs_sqrt[nb] * qn * qn * qn);
                    let c = sgn * half_xi * f * self.abs_sqrt[i] / qk * w;
                    let dd = sgn * half_xi * g * qk / self.abs_sqrt[i] * w;
                    dz += c * zn;
                    dq += dd * zn;
                    if self.variant == ModelVariant::Full {
                        let qnb = Complex64::new(y[on + 2], y[on + 3]);
                        let h = sgn * transport * qn / qk;
                        let gg = sgn * transport * qk / qn;
                        dz += h * zn;
                        dq += gg * qnb;
                    }
                }
            }
            dy[o] = dz.re;
            dy[o + 1] = dz.im;
            dy[o + 2] = dq.re;
            dy[o + 3] = dq.im;
        }
    }
}

/// Derivative of the whole lattice, as a [`LatticeState`] with the same `t`.
pub fn lattice_rhs(variant: ModelVariant, alpha: f64, state: &LatticeState, wave: &dyn WaveSource) -> LatticeState {
    let mut model = LatticeModel::new(alpha, state.xi, state.k_trunc(), variant);
    let y = state.to_reals();
    let mut dy = vec![0.0; y.len()];
    let (f, g) = wave.fg(state.t);
    model.eval(state.t, f, g, &y, &mut dy);
    LatticeState::from_reals(state.xi, state.t, &dy)
}

/// What to record during [`integrate_lattice`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordSpec {
    /// Extra record times inside the span.
    pub times: Vec<f64>,
    /// Also record every resonance time `t_k` inside the span.
    pub include_partition: bool,
    /// Number of additional uniformly spaced records (0 for none).
    pub uniform: usize,
    /// Keep full lattice snapshots at record times.
    pub keep_states: bool,
    /// Boundary mass fraction that triggers a warning count.
    pub spill_warn: f64,
    /// Boundary mass fraction that aborts the run.
    pub spill_limit: f64,
}

impl Default for RecordSpec {
    fn default() -> Self {
        RecordSpec {
            times: Vec::new(),
            include_partition: true,
            uniform: 0,
            keep_states: false,
            spill_warn: 1e-6,
            spill_limit: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub t: f64,
    /// l2 norm over all modes.
    pub norm: f64,
    /// `sqrt(sum_l E_l)` with the per-mode energies; NaN for `alpha <= 1/4`.
    pub energy_norm: f64,
    /// l2 norm of the `|k| = 1` modes.
    pub norm_k1: f64,
    /// l2 norm of the `|k| != 1` modes.
    pub norm_rest: f64,
    pub tail_fraction: f64,
}

impl NormRecord {
    pub fn of(alpha: f64, s: &LatticeState) -> Self {
        let energy_norm = if alpha > 0.25 {
            s.modes
                .iter()
                .enumerate()
                .map(|(i, m)| mode_energy(alpha, ModeIndex::new(s.k_of(i), s.xi), s.t, *m).unwrap_or(f64::NAN))
                .sum::<f64>()
                .sqrt()
        } else {
            f64::NAN
        };
        NormRecord {
            t: s.t,
            norm: s.norm(),
            energy_norm,
            norm_k1: s.projected_norm(|k| k.abs() == 1),
            norm_rest: s.projected_norm(|k| k.abs() != 1),
            tail_fraction: s.tail_fraction(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SpillStats {
    pub max_fraction: f64,
    pub t_at_max: f64,
    pub warnings: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeRun {
    pub variant: ModelVariant,
    pub records: Vec<NormRecord>,
    pub states: Vec<LatticeState>,
    pub final_state: LatticeState,
    pub stats: Stats,
    pub spill: SpillStats,
    /// Largest norm seen at any accepted step.
    pub sup_norm: f64,
}

impl LatticeRun {
    pub fn record_at(&self, t: f64) -> Option<&NormRecord> {
        self.records
            .iter()
            .find(|r| (r.t - t).abs() <= 1e-12 * t.abs().max(1.0))
    }
}

/// Integrate the lattice over `t_span` starting from `initial` (whose `t`
/// must equal `t_span.0`). With `params.enforce_regime` the end time may not
/// exceed `delta / epsilon^2`.
pub fn integrate_lattice(
    variant: ModelVariant,
    params: &Params,
    initial: &LatticeState,
    t_span: (f64, f64),
    record: &RecordSpec,
    wave: &dyn WaveSource,
    solver: &Solver,
) -> Result<LatticeRun> {
    let (t0, t1) = t_span;
    if !(t1 >= t0) || (initial.t - t0).abs() > 1e-12 * t0.abs().max(1.0) {
        return Err(Error::Domain(format!(
            "bad time span ({t0}, {t1}) for initial state at t = {}",
            initial.t
        )));
    }
    if params.enforce_regime && t1 > params.horizon() * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "end time {t1} exceeds delta/epsilon^2 = {}; disable regime enforcement to run beyond it",
            params.horizon()
        )));
    }
    if initial.xi != params.xi {
        return Err(Error::Domain("initial state and params disagree on xi".into()));
    }

    let mut times: Vec<f64> = vec![t0, t1];
    times.extend(record.times.iter().copied().filter(|&t| t >= t0 && t <= t1));
    if record.include_partition && params.xi > 0.0 {
        let k_max = initial.k_trunc().max(1);
        let p = resonance_partition(params.xi, params.epsilon, k_max)?;
        times.extend(p.times.iter().copied().filter(|&t| t >= t0 && t <= t1));
    }
    if record.uniform > 0 {
        let n = record.uniform;
        times.extend((1..n).map(|i| t0 + (t1 - t0) * i as f64 / n as f64));
    }
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));

    let alpha = params.alpha;
    let xi = initial.xi;
    let mut model = LatticeModel::new(alpha, xi, initial.k_trunc(), variant);
    let mut spill = SpillStats::default();
    let mut sup_norm = initial.norm();
    let n_modes = model.len();

    let y0 = initial.to_reals();
    let (ys, stats) = solver.integrate(
        |t, y, dy| {
            let (f, g) = wave.fg(t);
            model.eval(t, f, g, y, dy)
        },
        t0,
        &y0,
        &times,
        |ev| {
            let y = ev.y;
            let mut total = 0.0;
            for v in y {
                total += v * v;
            }
            let edge = |i: usize| y[4 * i..4 * i + 4].iter().map(|v| v * v).sum::<f64>();
            let frac = if total > 0.0 {
                ((edge(0) + edge(n_modes - 1)) / total).sqrt()
            } else {
                0.0
            };
            sup_norm = sup_norm.max(total.sqrt());
            if frac > spill.max_fraction {
                spill.max_fraction = frac;
                spill.t_at_max = ev.t;
            }
            if frac > record.spill_warn {
                spill.warnings += 1;
            }
            if frac > record.spill_limit {
                return Err(Error::TailSpill {
                    t: ev.t,
                    fraction: frac,
                    limit: record.spill_limit,
                });
            }
            Ok(())
        },
    )?;

    let mut records = Vec::with_capacity(times.len());
    let mut states = Vec::new();
    let mut final_state = initial.clone();
    for (&t, y) in times.iter().zip(&ys) {
        let s = LatticeState::from_reals(xi, t, y);
        records.push(NormRecord::of(alpha, &s));
        if record.keep_states {
            states.push(s.clone());
        }
        final_state = s;
    }
    Ok(LatticeRun {
        variant,
        records,
        states,
        final_state,
        stats,
        spill,
        sup_norm,
    })
}
