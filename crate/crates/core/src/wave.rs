//! Traveling-wave amplitudes `f(t), g(t)`.
//!
//! Inserting `W = f cos x`, `F = g sin x` into the nonlinear equations gives
//! the linear system `f' = g`, `g' = -alpha f / (1 + t^2)` with
//! `f(0) = g(0) = epsilon`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{hermite, Solver, Stats};

#[inline]
pub fn wave_rhs(alpha: f64, t: f64, y: &[f64], dy: &mut [f64]) {
    dy[0] = y[1];
    dy[1] = -alpha * y[0] / (1.0 + t * t);
}

/// `E = alpha f^2 / sqrt(1+t^2) + sqrt(1+t^2) g^2`.
#[inline]
pub fn wave_energy(alpha: f64, f: f64, g: f64, t: f64) -> f64 {
    let w = (1.0 + t * t).sqrt();
    alpha.abs() * f * f / w + w * g * g
}

/// Closed-form `dE/dt` along solutions.
#[inline]
pub fn wave_energy_rate(alpha: f64, f: f64, g: f64, t: f64) -> f64 {
    let s = 1.0 + t * t;
    t / s.sqrt() * (g * g - alpha * f * f / s)
}

/// Source of wave amplitudes at arbitrary times.
pub trait WaveSource: Sync {
    fn fg(&self, t: f64) -> (f64, f64);
}

/// The zero wave; the lattice then reduces to the homogeneous dynamics.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoWave;

impl WaveSource for NoWave {
    fn fg(&self, _t: f64) -> (f64, f64) {
        (0.0, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveTrajectory {
    pub alpha: f64,
    pub epsilon: f64,
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub energy: Vec<f64>,
    pub stats: Stats,
}

impl WaveTrajectory {
    /// Every accepted step on `[0, t_end]`, suitable for interpolation.
    /// Unless the solver already caps steps relative to `t`, steps are
    /// limited to `0.05 (1 + t)`, which keeps the cubic Hermite interpolant
    /// near the integrator tolerance.
    pub fn dense(alpha: f64, epsilon: f64, t_end: f64, solver: &Solver) -> Result<Self> {
        check(alpha, epsilon)?;
        let mut solver = *solver;
        if solver.max_step_rel.is_none() {
            solver.max_step_rel = Some(0.05);
        }
        let mut traj = WaveTrajectory::empty(alpha, epsilon);
        let (_, stats) = solver.integrate(
            |t, y, dy| wave_rhs(alpha, t, y, dy),
            0.0,
            &[epsilon, epsilon],
            &[t_end.max(0.0)],
            |ev| {
                traj.push(ev.t, ev.y[0], ev.y[1]);
                Ok(())
            },
        )?;
        traj.stats = stats;
        Ok(traj)
    }

    fn empty(alpha: f64, epsilon: f64) -> Self {
        WaveTrajectory {
            alpha,
            epsilon,
            t: Vec::new(),
            f: Vec::new(),
            g: Vec::new(),
            energy: Vec::new(),
            stats: Stats::default(),
        }
    }

    fn push(&mut self, t: f64, f: f64, g: f64) {
        self.t.push(t);
        self.f.push(f);
        self.g.push(g);
        self.energy.push(wave_energy(self.alpha, f, g, t));
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Cubic Hermite interpolation between samples, using the exact
    /// derivatives from the ODE. Times outside the sampled range are clamped.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let n = self.t.len();
        if n == 0 {
            return (0.0, 0.0);
        }
        if t <= self.t[0] {
            return (self.f[0], self.g[0]);
        }
        if t >= self.t[n - 1] {
            return (self.f[n - 1], self.g[n - 1]);
        }
        let i = self.t.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let (f0, f1, g0, g1) = (self.f[i], self.f[i + 1], self.g[i], self.g[i + 1]);
        let a = self.alpha;
        let dg0 = -a * f0 / (1.0 + t0 * t0);
        let dg1 = -a * f1 / (1.0 + t1 * t1);
        (
            hermite(t0, f0, g0, t1, f1, g1, t),
            hermite(t0, g0, dg0, t1, g1, dg1, t),
        )
    }

    /// `(min, max)` of `E(t)/E(0)` over the samples.
    pub fn energy_ratio_range(&self) -> (f64, f64) {
        let e0 = self.energy.first().copied().unwrap_or(0.0);
        if e0 == 0.0 {
            return (1.0, 1.0);
        }
        self.energy
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| {
                (lo.min(e / e0), hi.max(e / e0))
            })
    }

    /// Smallest `C` with `E(t)/E(0)` in `[1/C, C]` on the samples.
    pub fn energy_constant(&self) -> f64 {
        let (lo, hi) = self.energy_ratio_range();
        hi.max(1.0 / lo)
    }

    /// `F(t) = int_0^t f(s)/(1+s^2) ds` by Simpson's rule on each step,
    /// with midpoints from the interpolant.
    pub fn transport_shift(&self, t_end: f64) -> f64 {
        let h = |t: f64| self.eval(t).0 / (1.0 + t * t);
        let mut acc = 0.0;
        for i in 1..self.t.len() {
            let (a, b) = (self.t[i - 1], self.t[i].min(t_end));
            if a >= t_end {
                break;
            }
            acc += (b - a) / 6.0 * (h(a) + 4.0 * h(0.5 * (a + b)) + h(b));
        }
        acc
    }
}

impl WaveSource for WaveTrajectory {
    fn fg(&self, t: f64) -> (f64, f64) {
        self.eval(t)
    }
}

fn check(alpha: f64, epsilon: f64) -> Result<()> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("wave needs alpha >= 0, got {alpha}")));
    }
    if !epsilon.is_finite() {
        return Err(Error::Domain("wave amplitude must be finite".into()));
    }
    Ok(())
}

/// Solve the wave ODE and sample it on `t_grid`, which must start at 0.
pub fn wave_coefficients(alpha: f64, epsilon: f64, t_grid: &[f64], solver: &Solver) -> Result<WaveTrajectory> {
    check(alpha, epsilon)?;
    if t_grid.first() != Some(&0.0) {
        return Err(Error::Domain("wave time grid must start at t = 0".into()));
    }
    let (ys, stats) = solver.integrate(
        |t, y, dy| wave_rhs(alpha, t, y, dy),
        0.0,
        &[epsilon, epsilon],
        t_grid,
        |_| Ok(()),
    )?;
    let mut traj = WaveTrajectory::empty(alpha, epsilon);
    for (&t, y) in t_grid.iter().zip(&ys) {
        traj.push(t, y[0], y[1]);
    }
    traj.stats = stats;
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    /// `sup |f(t)| / (eps sqrt(1+t))`.
    pub f_ratio: f64,
    /// `sup |g(t)| sqrt(1+t) / eps`.
    pub g_ratio: f64,
    /// False for `alpha <= 1/4`, where the envelopes need not hold.
    pub stable_regime: bool,
}

pub fn envelope_check(traj: &WaveTrajectory) -> EnvelopeReport {
    let eps = traj.epsilon.abs();
    let mut f_ratio: f64 = 0.0;
    let mut g_ratio: f64 = 0.0;
    if eps > 0.0 {
        for i in 0..traj.len() {
            let w = (1.0 + traj.t[i]).sqrt();
            f_ratio = f_ratio.max(traj.f[i].abs() / (eps * w));
            g_ratio = g_ratio.max(traj.g[i].abs() * w / eps);
        }
    }
    EnvelopeReport {
        f_ratio,
        g_ratio,
        stable_regime: traj.alpha > 0.25,
    }
}
