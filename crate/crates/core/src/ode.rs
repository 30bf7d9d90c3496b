//! Explicit Runge–Kutta integration of real ODE systems `y' = F(t, y)`.
//!
//! The adaptive scheme is the Dormand–Prince 5(4) pair with local
//! extrapolation. Requested output times are hit exactly by shortening the
//! step that would cross them. A classical fixed-step RK4 mode is available
//! for runs that must be bit-reproducible across tolerance settings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Stepping {
    Adaptive,
    Fixed { h: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Solver {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Additional cap `h <= max_step_rel * (1 + |t|)`, if set.
    pub max_step_rel: Option<f64>,
    pub max_steps: usize,
    pub stepping: Stepping,
}

impl Default for Solver {
    fn default() -> Self {
        Solver {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            h_min: 1e-12,
            h_max: f64::INFINITY,
            max_step_rel: None,
            max_steps: 50_000_000,
            stepping: Stepping::Adaptive,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub accepted: u64,
    pub rejected: u64,
    pub rhs_evals: u64,
}

impl Stats {
    pub fn merge(&mut self, other: Stats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.rhs_evals += other.rhs_evals;
    }
}

/// What the observer sees after each accepted step.
#[derive(Debug)]
pub struct StepEvent<'a> {
    pub t: f64,
    pub y: &'a [f64],
    /// Derivative at `(t, y)`.
    pub dy: &'a [f64],
    /// True when `t` is one of the requested output times.
    pub is_output: bool,
}

// Dormand–Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b*, the embedded error weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

impl Solver {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Solver {
            rel_tol,
            abs_tol,
            ..Solver::default()
        }
    }

    pub fn fixed(h: f64) -> Self {
        Solver {
            stepping: Stepping::Fixed { h },
            ..Solver::default()
        }
    }

    fn cap(&self, t: f64) -> f64 {
        let mut cap = self.h_max;
        if let Some(r) = self.max_step_rel {
            cap = cap.min(r * (1.0 + t.abs()));
        }
        if let Stepping::Fixed { h } = self.stepping {
            cap = cap.min(h);
        }
        cap
    }

    /// Integrate from `t0` through every time in `outputs` (sorted, `>= t0`)
    /// and return the state at each of them. `observe` is called after every
    /// accepted step, including the initial point.
    pub fn integrate<F, O>(
        &self,
        mut rhs: F,
        t0: f64,
        y0: &[f64],
        outputs: &[f64],
        mut observe: O,
    ) -> Result<(Vec<Vec<f64>>, Stats)>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
        O: FnMut(StepEvent<'_>) -> Result<()>,
    {
        let n = y0.len();
        let mut stats = Stats::default();
        let mut results = Vec::with_capacity(outputs.len());
        if outputs.windows(2).any(|w| w[1] < w[0]) || outputs.first().is_some_and(|&t| t < t0) {
            return Err(Error::Domain("output times must be sorted and >= t0".into()));
        }

        let mut t = t0;
        let mut y = y0.to_vec();
        let mut f0 = vec![0.0; n];
        rhs(t, &y, &mut f0);
        stats.rhs_evals += 1;
        let mut out_iter = outputs.iter().copied().peekable();
        let mut at_output = false;
        while out_iter.peek() == Some(&t0) {
            out_iter.next();
            results.push(y.clone());
            at_output = true;
        }
        observe(StepEvent { t, y: &y, dy: &f0, is_output: at_output })?;

        let t_final = match outputs.last() {
            Some(&tf) => tf,
            None => return Ok((results, stats)),
        };

        let mut k = vec![vec![0.0; n]; 7];
        let mut tmp = vec![0.0; n];
        let mut y_new = vec![0.0; n];
        let mut f_new = vec![0.0; n];
        let mut h = match self.stepping {
            Stepping::Fixed { h } => h,
            Stepping::Adaptive => self.initial_step(&mut rhs, t, &y, &f0, &mut stats),
        };

        while t < t_final {
            if stats.accepted + stats.rejected >= self.max_steps as u64 {
                return Err(Error::StepUnderflow { t, h });
            }
            let target = *out_iter.peek().expect("t < t_final implies a pending output");
            h = h.min(self.cap(t));
            let mut hits = false;
            if t + h >= target || (target - t - h) < 1e-12 * target.abs().max(1.0) {
                h = target - t;
                hits = true;
            }
            if h <= 0.0 {
                return Err(Error::StepUnderflow { t, h });
            }

            let err = match self.stepping {
                Stepping::Fixed { .. } => {
                    rk4_step(&mut rhs, t, &y, &f0, h, &mut k, &mut tmp, &mut y_new);
                    stats.rhs_evals += 3;
                    0.0
                }
                Stepping::Adaptive => {
                    let e = self.dp_step(&mut rhs, t, &y, &f0, h, &mut k, &mut tmp, &mut y_new);
                    stats.rhs_evals += 6;
                    e
                }
            };

            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                if matches!(self.stepping, Stepping::Fixed { .. }) {
                    return Err(Error::NonFinite { t });
                }
                stats.rejected += 1;
                h *= 0.2;
                if h < self.h_min {
                    return Err(Error::StepUnderflow { t, h });
                }
                continue;
            }

            if err <= 1.0 {
                let t_new = if hits { target } else { t + h };
                match self.stepping {
                    Stepping::Adaptive => f_new.copy_from_slice(&k[6]),
                    Stepping::Fixed { .. } => {
                        rhs(t_new, &y_new, &mut f_new);
                        stats.rhs_evals += 1;
                    }
                }
                t = t_new;
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut f0, &mut f_new);
                stats.accepted += 1;
                let mut is_output = false;
                while out_iter.peek().is_some_and(|&o| o <= t) {
                    out_iter.next();
                    results.push(y.clone());
                    is_output = true;
                }
                observe(StepEvent { t, y: &y, dy: &f0, is_output })?;
                if let Stepping::Adaptive = self.stepping {
                    let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    // A step shortened to hit an output says nothing about the
                    // natural step size; keep the larger of the two.
                    h = if hits { (h * fac).max(h) } else { h * fac };
                } else if let Stepping::Fixed { h: hf } = self.stepping {
                    h = hf;
                }
            } else {
                stats.rejected += 1;
                h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                if h < self.h_min {
                    return Err(Error::StepUnderflow { t, h });
                }
            }
        }
        Ok((results, stats))
    }

    fn initial_step<F>(&self, rhs: &mut F, t: f64, y: &[f64], f0: &[f64], stats: &mut Stats) -> f64
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let sc = |i: usize| self.abs_tol + self.rel_tol * y[i].abs();
        let n = y.len().max(1) as f64;
        let d0 = (y.iter().enumerate().map(|(i, v)| (v / sc(i)).powi(2)).sum::<f64>() / n).sqrt();
        let d1 = (f0.iter().enumerate().map(|(i, v)| (v / sc(i)).powi(2)).sum::<f64>() / n).sqrt();
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(self.cap(t));
        let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
        let mut f1 = vec![0.0; y.len()];
        rhs(t + h0, &y1, &mut f1);
        stats.rhs_evals += 1;
        let d2 = (f1
            .iter()
            .zip(f0)
            .enumerate()
            .map(|(i, (a, b))| ((a - b) / sc(i)).powi(2))
            .sum::<f64>()
            / n)
            .sqrt()
            / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.cap(t)).max(self.h_min)
    }

    #[allow(clippy::too_many_arguments)]
    fn dp_step<F>(
        &self,
        rhs: &mut F,
        t: f64,
        y: &[f64],
        f0: &[f64],
        h: f64,
        k: &mut [Vec<f64>],
        tmp: &mut [f64],
        y_new: &mut [f64],
    ) -> f64
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let n = y.len();
        k[0].copy_from_slice(f0);
        for i in 0..n {
            tmp[i] = y[i] + h * A21 * k[0][i];
        }
        rhs(t + C2 * h, tmp, &mut k[1]);
        for i in 0..n {
            tmp[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i]);
        }
        rhs(t + C3 * h, tmp, &mut k[2]);
        for i in 0..n {
            tmp[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
        }
        rhs(t + C4 * h, tmp, &mut k[3]);
        for i in 0..n {
            tmp[i] = y[i] + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
        }
        rhs(t + C5 * h, tmp, &mut k[4]);
        for i in 0..n {
            tmp[i] = y[i]
                + h * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i] + A64 * k[3][i] + A65 * k[4][i]);
        }
        rhs(t + h, tmp, &mut k[5]);
        for i in 0..n {
            y_new[i] = y[i]
                + h * (B1 * k[0][i] + B3 * k[2][i] + B4 * k[3][i] + B5 * k[4][i] + B6 * k[5][i]);
        }
        let (head, tail) = k.split_at_mut(6);
        rhs(t + h, y_new, &mut tail[0]);
        let k7 = &tail[0];
        let mut acc = 0.0;
        for i in 0..n {
            let e = h
                * (E1 * head[0][i] + E3 * head[2][i] + E4 * head[3][i] + E5 * head[4][i] + E6 * head[5][i]
                    + E7 * k7[i]);
            let sc = self.abs_tol + self.rel_tol * y[i].abs().max(y_new[i].abs());
            acc += (e / sc).powi(2);
        }
        (acc / n.max(1) as f64).sqrt()
    }
}

#[allow(clippy::too_many_arguments)]
fn rk4_step<F>(
    rhs: &mut F,
    t: f64,
    y: &[f64],
    f0: &[f64],
    h: f64,
    k: &mut [Vec<f64>],
    tmp: &mut [f64],
    y_new: &mut [f64],
) where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * f0[i];
    }
    rhs(t + 0.5 * h, tmp, &mut k[1]);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k[1][i];
    }
    rhs(t + 0.5 * h, tmp, &mut k[2]);
    for i in 0..n {
        tmp[i] = y[i] + h * k[2][i];
    }
    rhs(t + h, tmp, &mut k[3]);
    for i in 0..n {
        y_new[i] = y[i] + h / 6.0 * (f0[i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
    }
}

/// Cubic Hermite interpolation on `[t0, t1]` from values and derivatives.
#[inline]
pub fn hermite(t0: f64, y0: f64, d0: f64, t1: f64, y1: f64, d1: f64, t: f64) -> f64 {
    let h = t1 - t0;
    if h == 0.0 {
        return y0;
    }
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}
