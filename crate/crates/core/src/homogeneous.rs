//! Per-mode dynamics of the linearization around the stationary state.
//!
//! Each mode `(k, xi)` evolves by the 2x2 system
//!
//! ```text
//! Z' =  m/2 Z - i b Q
//! Q' = -i b Z - m/2 Q
//! ```
//!
//! with `m = k (xi - k t) / (k^2 + (xi - k t)^2)` and
//! `b = sqrt(alpha) k / sqrt(k^2 + (xi - k t)^2)`. The off-diagonal part is
//! anti-Hermitian, so `d/dt (|Z|^2 + |Q|^2) = m (|Z|^2 - |Q|^2)`.
//!
//! For `k != 0` the system depends on `(k, xi, t)` only through
//! `u = xi/k - t` (and on the sign of `k` through a unitary rephasing of
//! `Q`), which is what [`estimate_c_alpha`] exploits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mode_lattice::{symbol_delta_t, symbol_lt, ModeIndex, ModeState};
use crate::ode::Solver;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Coupling strength `b = sqrt(alpha) k (k^2 + (xi - k t)^2)^{-1/2}`; zero on the x-average.
#[inline]
pub fn buoyancy_symbol(alpha: f64, m: ModeIndex, t: f64) -> f64 {
    if m.k == 0 {
        return 0.0;
    }
    alpha.sqrt() * m.k as f64 / symbol_delta_t(m, t).sqrt()
}

/// `(xi - k t) / sqrt(k^2 + (xi - k t)^2)`, decreasing in `t` from +1 to -1 for `k > 0`.
#[inline]
pub fn energy_multiplier(m: ModeIndex, t: f64) -> f64 {
    if m.k == 0 {
        return 0.0;
    }
    m.shifted(t) / symbol_delta_t(m, t).sqrt()
}

#[inline]
pub fn homogeneous_rhs(alpha: f64, m: ModeIndex, t: f64, s: ModeState) -> ModeState {
    let half_m = 0.5 * symbol_lt(m, t);
    let ib = I * buoyancy_symbol(alpha, m, t);
    ModeState {
        z: half_m * s.z - ib * s.q,
        q: -ib * s.z - half_m * s.q,
    }
}

/// Energy `|Z|^2 + |Q|^2 - alpha^{-1/2} mu Im(Z conj Q)` with `mu` from
/// [`energy_multiplier`]. Along the homogeneous flow its derivative is
/// `-alpha^{-1/2} mu' Im(Z conj Q)`, so it changes only while `mu` moves.
/// It is comparable to `|Z|^2 + |Q|^2` exactly when `alpha > 1/4`.
pub fn mode_energy(alpha: f64, m: ModeIndex, t: f64, s: ModeState) -> Result<f64> {
    if !(alpha > 0.25) {
        return Err(Error::Domain(format!(
            "mode energy is indefinite for alpha <= 1/4 (alpha = {alpha})"
        )));
    }
    let cross = (s.z * s.q.conj()).im;
    Ok(s.norm_sqr() - energy_multiplier(m, t) / alpha.sqrt() * cross)
}

/// Total variation of the energy multiplier on `[t1, t2]`; it is monotone
/// in `t`, so this is the absolute difference of the endpoint values.
pub fn multiplier_variation(m: ModeIndex, t1: f64, t2: f64) -> f64 {
    (energy_multiplier(m, t2) - energy_multiplier(m, t1)).abs()
}

/// The comparison bound `exp(V / (2 sqrt(alpha)))` on `sup E(t)/E(t1)`.
pub fn variation_bound(alpha: f64, m: ModeIndex, t1: f64, t2: f64) -> f64 {
    (multiplier_variation(m, t1, t2) / (2.0 * alpha.sqrt())).exp()
}

/// Gronwall bound `exp(int |mu'| / (2 sqrt(alpha) - |mu|) dt)` on
/// `sup E(t)/E(t1)`, valid for every `alpha > 1/4`.
pub fn rigorous_energy_bound(alpha: f64, m: ModeIndex, t1: f64, t2: f64) -> f64 {
    let a = 2.0 * alpha.sqrt();
    // Antiderivative of 1/(a - |mu|) in mu.
    let h = |mu: f64| mu.signum() * (a.ln() - (a - mu.abs()).ln());
    let (m1, m2) = (energy_multiplier(m, t1), energy_multiplier(m, t2));
    (h(m1) - h(m2)).abs().exp()
}

/// A 2x2 complex matrix mapping `(Z, Q)` at `t1` to `(Z, Q)` at `t2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Propagator2x2 {
    pub mode: ModeIndex,
    pub t1: f64,
    pub t2: f64,
    pub matrix: [[Complex64; 2]; 2],
}

impl Propagator2x2 {
    pub fn identity(mode: ModeIndex, t: f64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Propagator2x2 {
            mode,
            t1: t,
            t2: t,
            matrix: [[one, zero], [zero, one]],
        }
    }

    pub fn apply(&self, s: ModeState) -> ModeState {
        let m = &self.matrix;
        ModeState {
            z: m[0][0] * s.z + m[0][1] * s.q,
            q: m[1][0] * s.z + m[1][1] * s.q,
        }
    }

    /// `self ∘ earlier`, mapping `earlier.t1` to `self.t2`.
    pub fn after(&self, earlier: &Propagator2x2) -> Propagator2x2 {
        Propagator2x2 {
            mode: self.mode,
            t1: earlier.t1,
            t2: self.t2,
            matrix: mat_mul(&self.matrix, &earlier.matrix),
        }
    }

    pub fn op_norm(&self) -> f64 {
        op_norm(&self.matrix)
    }
}

pub fn mat_mul(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Largest singular value of a 2x2 complex matrix.
pub fn op_norm(m: &[[Complex64; 2]; 2]) -> f64 {
    let fro = m.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    // Singular values satisfy s1^2 + s2^2 = fro and s1 s2 = |det|.
    let disc = (fro * fro - 4.0 * det * det).max(0.0).sqrt();
    (0.5 * (fro + disc)).sqrt()
}

/// Inverse of a 2x2 matrix.
pub fn mat_inv(m: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
}

fn column_rhs(alpha: f64, m: ModeIndex, t: f64, y: &[f64], dy: &mut [f64]) {
    for col in 0..2 {
        let o = 4 * col;
        let s = ModeState::new(Complex64::new(y[o], y[o + 1]), Complex64::new(y[o + 2], y[o + 3]));
        let d = homogeneous_rhs(alpha, m, t, s);
        dy[o..o + 4].copy_from_slice(&[d.z.re, d.z.im, d.q.re, d.q.im]);
    }
}

fn columns_to_matrix(y: &[f64]) -> [[Complex64; 2]; 2] {
    [
        [Complex64::new(y[0], y[1]), Complex64::new(y[4], y[5])],
        [Complex64::new(y[2], y[3]), Complex64::new(y[6], y[7])],
    ]
}

const IDENTITY_COLUMNS: [f64; 8] = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];

/// Solution operator `S(t2, t1)` for one mode, by integrating both columns.
pub fn propagator(alpha: f64, m: ModeIndex, t1: f64, t2: f64, solver: &Solver) -> Result<Propagator2x2> {
    if t2 < t1 {
        return Err(Error::Domain(format!("propagator needs t1 <= t2, got {t1} > {t2}")));
    }
    let (ys, _) = solver.integrate(
        |t, y, dy| column_rhs(alpha, m, t, y, dy),
        t1,
        &IDENTITY_COLUMNS,
        &[t2],
        |_| Ok(()),
    )?;
    Ok(Propagator2x2 {
        mode: m,
        t1,
        t2,
        matrix: columns_to_matrix(&ys[0]),
    })
}

/// Evolve a single mode state from `t1` to `t2 >= t1`.
pub fn propagate(alpha: f64, m: ModeIndex, t1: f64, t2: f64, s: ModeState, solver: &Solver) -> Result<ModeState> {
    Ok(propagate_recorded(alpha, m, t1, s, &[t2], solver)?[0])
}

/// Evolve a single mode and return its state at each of the sorted `times`.
pub fn propagate_recorded(
    alpha: f64,
    m: ModeIndex,
    t1: f64,
    s: ModeState,
    times: &[f64],
    solver: &Solver,
) -> Result<Vec<ModeState>> {
    if times.first().is_some_and(|&t| t < t1) {
        return Err(Error::Domain("propagation runs forward in time only".into()));
    }
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let s = ModeState::new(Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]));
        let d = homogeneous_rhs(alpha, m, t, s);
        dy.copy_from_slice(&[d.z.re, d.z.im, d.q.re, d.q.im]);
    };
    let (ys, _) = solver.integrate(rhs, t1, &[s.z.re, s.z.im, s.q.re, s.q.im], times, |_| Ok(()))?;
    Ok(ys
        .iter()
        .map(|y| ModeState::new(Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3])))
        .collect())
}

/// Relative Frobenius error of `S(t3, t2) S(t2, t1)` against `S(t3, t1)`.
pub fn semigroup_error(alpha: f64, m: ModeIndex, t1: f64, t2: f64, t3: f64, solver: &Solver) -> Result<f64> {
    let a = propagator(alpha, m, t1, t2, solver)?;
    let b = propagator(alpha, m, t2, t3, solver)?;
    let c = propagator(alpha, m, t1, t3, solver)?;
    let ab = b.after(&a);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            num += (ab.matrix[i][j] - c.matrix[i][j]).norm_sqr();
            den += c.matrix[i][j].norm_sqr();
        }
    }
    Ok((num / den).sqrt())
}

/// Extremes of the mode energy along one homogeneous trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyExcursion {
    pub mode: ModeIndex,
    pub alpha: f64,
    pub t1: f64,
    pub t2: f64,
    /// `sup E(t) / E(t1)` over accepted steps.
    pub sup_ratio: f64,
    pub inf_ratio: f64,
    /// `sup |s(t)| / |s(t1)|`.
    pub sup_norm_ratio: f64,
    /// Total variation of the energy multiplier.
    pub variation: f64,
    pub variation_bound: f64,
    pub rigorous_bound: f64,
}

/// Track the mode energy from `t1` to `t2`. Steps are capped at 0.5 so the
/// extremes are resolved near the resonant time.
pub fn energy_excursion(
    alpha: f64,
    m: ModeIndex,
    t1: f64,
    t2: f64,
    s: ModeState,
    solver: &Solver,
) -> Result<EnergyExcursion> {
    let e0 = mode_energy(alpha, m, t1, s)?;
    let n0 = s.norm();
    let mut solver = *solver;
    solver.h_max = solver.h_max.min(0.5);
    let mut sup: f64 = 1.0;
    let mut inf: f64 = 1.0;
    let mut sup_n: f64 = 1.0;
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let st = ModeState::new(Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]));
        let d = homogeneous_rhs(alpha, m, t, st);
        dy.copy_from_slice(&[d.z.re, d.z.im, d.q.re, d.q.im]);
    };
    solver.integrate(rhs, t1, &[s.z.re, s.z.im, s.q.re, s.q.im], &[t2], |ev| {
        let st = ModeState::new(Complex64::new(ev.y[0], ev.y[1]), Complex64::new(ev.y[2], ev.y[3]));
        let e = mode_energy(alpha, m, ev.t, st)?;
        sup = sup.max(e / e0);
        inf = inf.min(e / e0);
        sup_n = sup_n.max(st.norm() / n0);
        Ok(())
    })?;
    Ok(EnergyExcursion {
        mode: m,
        alpha,
        t1,
        t2,
        sup_ratio: sup,
        inf_ratio: inf,
        sup_norm_ratio: sup_n,
        variation: multiplier_variation(m, t1, t2),
        variation_bound: variation_bound(alpha, m, t1, t2),
        rigorous_bound: rigorous_energy_bound(alpha, m, t1, t2),
    })
}

/// Sampling grid for the reduced variable `u = xi/k - t`: `u = 0` plus
/// `±u` log-spaced on `[u_min, u_max]` with `8 * 2^level` segments per
/// side. Grids with the same bounds are nested in `level`, so the estimate
/// is nondecreasing under refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CAlphaGrid {
    pub u_min: f64,
    pub u_max: f64,
    pub level: u32,
}

impl Default for CAlphaGrid {
    fn default() -> Self {
        CAlphaGrid {
            u_min: 1e-2,
            u_max: 1e4,
            level: 4,
        }
    }
}

impl CAlphaGrid {
    /// Sample points in decreasing `u` (increasing time).
    pub fn points(&self) -> Vec<f64> {
        let n = 8usize << self.level;
        let (a, b) = (self.u_min.ln(), self.u_max.ln());
        let side: Vec<f64> = (0..=n).map(|i| (a + (b - a) * i as f64 / n as f64).exp()).collect();
        let mut u: Vec<f64> = side.iter().rev().copied().collect();
        u.push(0.0);
        u.extend(side.iter().map(|v| -v));
        u
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CAlphaEstimate {
    pub alpha: f64,
    pub value: f64,
    /// Reduced variables `(u1, u2)` of the maximizing pair, `u1 >= u2`.
    pub argmax: (f64, f64),
    pub grid: CAlphaGrid,
}

/// Supremum of `|S(t2, t1)|` over the sampled pairs of the reduced
/// variable, i.e. over all `(k != 0, xi, t1 <= t2)` mapping into the grid.
pub fn estimate_c_alpha(alpha: f64, grid: CAlphaGrid, solver: &Solver) -> Result<CAlphaEstimate> {
    if !(alpha > 0.25) {
        return Err(Error::Domain(format!("C_alpha is only finite for alpha > 1/4, got {alpha}")));
    }
    let us = grid.points();
    let u0 = us[0];
    // k = 1, xi = u0 maps t to u = u0 - t.
    let mode = ModeIndex::new(1, u0);
    let times: Vec<f64> = us.iter().map(|u| u0 - u).collect();
    let (value, (i, j)) = sup_over_pairs(alpha, mode, &times, solver)?;
    Ok(CAlphaEstimate {
        alpha,
        value,
        argmax: (us[i], us[j]),
        grid,
    })
}

/// Supremum of `|S(t_j, t_i)|` over `i <= j` for a single mode, with the
/// fundamental matrix computed once from `times[0]`.
pub fn sup_over_pairs(alpha: f64, mode: ModeIndex, times: &[f64], solver: &Solver) -> Result<(f64, (usize, usize))> {
    let (ys, _) = solver.integrate(
        |t, y, dy| column_rhs(alpha, mode, t, y, dy),
        times[0],
        &IDENTITY_COLUMNS,
        times,
        |_| Ok(()),
    )?;
    let phi: Vec<_> = ys.iter().map(|y| columns_to_matrix(y)).collect();
    let inv: Vec<_> = phi.iter().map(mat_inv).collect();
    let mut best = (1.0, (0, 0));
    for i in 0..phi.len() {
        for j in i + 1..phi.len() {
            let n = op_norm(&mat_mul(&phi[j], &inv[i]));
            if n > best.0 {
                best = (n, (i, j));
            }
        }
    }
    Ok(best)
}
