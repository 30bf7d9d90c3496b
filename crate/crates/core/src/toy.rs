//! Two reduced two-mode models of a single resonance.
//!
//! The first keeps the resonant amplitude `Z_R` frozen and integrates the
//! forcing of the non-resonant neighbour `Z_NR` across one interval `I_k`.
//! The second keeps the back-coupling, giving a Legendre-type system on
//! `(-mu, mu)` with `mu = xi/k^2`, centred at the resonant time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mode_lattice::resonance_partition;
use crate::ode::Solver;
use crate::quadrature;
use crate::special::{fit_line, gamma};

/// `int_R (1+s^2)^{-3/4} ds = sqrt(pi) Gamma(1/4) / Gamma(3/4)`.
pub fn kernel_reference() -> f64 {
    std::f64::consts::PI.sqrt() * gamma(0.25) / gamma(0.75)
}

/// `int_W^inf (1+s^2)^{-3/4} ds` from the large-`s` expansion; the first
/// omitted term is `O(W^{-17/2})`.
pub fn kernel_tail(w: f64) -> f64 {
    let r = w.powf(-0.5);
    let inv2 = 1.0 / (w * w);
    r * (2.0 - inv2 * (3.0 / 10.0 - inv2 * (7.0 / 48.0 - inv2 * (231.0 / 2496.0))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelIntegral {
    pub window: f64,
    /// Quadrature over `(-window, window)`.
    pub inner: f64,
    /// Both tails.
    pub tail: f64,
    pub value: f64,
    pub reference: f64,
    pub quadrature_error: f64,
}

pub fn resonance_kernel_integral_with(window: f64) -> KernelIntegral {
    let q = quadrature::integrate(|s| (1.0 + s * s).powf(-0.75), -window, window, 1e-14, 1e-14, 4000);
    let tail = 2.0 * kernel_tail(window);
    KernelIntegral {
        window,
        inner: q.value,
        tail,
        value: q.value + tail,
        reference: kernel_reference(),
        quadrature_error: q.error,
    }
}

/// Full-line kernel integral with a window of 100.
pub fn resonance_kernel_integral() -> KernelIntegral {
    resonance_kernel_integral_with(100.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyGrowth {
    pub xi: f64,
    pub k: u64,
    pub epsilon: f64,
    pub z_nr: f64,
    /// `eps sqrt(xi/k) sqrt(xi/k^2)`.
    pub scale: f64,
    /// `(z_nr / z_r) / scale`.
    pub ratio: f64,
}

/// `Z_NR(t_{k-1})` for `Z_NR(t_k) = 0` under the frozen-resonant toy model.
pub fn toy_growth(xi: f64, k: u64, epsilon: f64, z_r: f64) -> Result<ToyGrowth> {
    if k == 0 {
        return Err(Error::Domain("toy model needs k >= 1".into()));
    }
    let kf = k as f64;
    let mu = xi / (kf * kf);
    if !(mu >= 100.0) {
        return Err(Error::Domain(format!("toy model needs xi/k^2 >= 100, got {mu}")));
    }
    let p = resonance_partition(xi, epsilon, k as usize)?;
    let (a, b) = p.interval(k as usize).expect("k <= k_max");
    let centre = xi / kf;
    let amp = epsilon * mu.sqrt();
    let integrand = |t: f64| {
        let s = t - centre;
        amp * (1.0 + t * t).powf(0.25) * (1.0 + s * s).powf(-0.75)
    };
    // Split at the resonant peak so the first bisection sees it.
    let q1 = quadrature::integrate(integrand, a, centre, 0.0, 1e-12, 4000);
    let q2 = quadrature::integrate(integrand, centre, b, 0.0, 1e-12, 4000);
    let gain = q1.value + q2.value;
    let scale = epsilon * (xi / kf).sqrt() * mu.sqrt();
    Ok(ToyGrowth {
        xi,
        k,
        epsilon,
        z_nr: gain * z_r,
        scale,
        ratio: gain / scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TwoModeState {
    pub z_r: f64,
    pub z_nr: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LegendreKind {
    /// Both couplings positive: the upper envelope of the inequalities.
    Envelope,
    /// Back-coupling with the opposite sign (oscillatory).
    Signed,
}

/// The piecewise energy used for the two-mode model with `mu = xi/k^2`:
/// `sqrt(1+t^2) Z_NR^2/mu + Z_R^2` for `t < 0` and
/// `Z_NR^2/mu + Z_R^2 / sqrt(1+t^2)` for `t >= 0`.
pub fn legendre_energy(mu: f64, s: TwoModeState) -> f64 {
    let w = (1.0 + s.t * s.t).sqrt();
    if s.t < 0.0 {
        w * s.z_nr * s.z_nr / mu + s.z_r * s.z_r
    } else {
        s.z_nr * s.z_nr / mu + s.z_r * s.z_r / w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegendreReport {
    pub mu: f64,
    pub kind: LegendreKind,
    pub initial: TwoModeState,
    pub final_state: TwoModeState,
    pub f_sup: f64,
    pub delta_nr: f64,
    pub delta_r: f64,
    /// `ln(sup E(t)/E(-mu)) / ln mu`, clamped at 0.
    pub gamma_energy: f64,
    /// `|dZ_NR| / (|f| mu^{1/2+gamma} (|Z_R| + |f| |Z_NR|))` with `gamma_energy`.
    pub nr_bound_ratio: f64,
    /// Same for `Z_R` with the roles swapped.
    pub r_bound_ratio: f64,
    /// Largest `E(t) / (exp(int f (1+s^2)^{-1/2}) E(-mu))` along the run.
    pub energy_check: f64,
    /// Same with the factor 2 that direct differentiation gives.
    pub energy_check_doubled: f64,
}

/// Integrate the two-mode system on `(-mu, mu)`:
/// `Z_NR' = f sqrt(mu) (1+t^2)^{-3/4} Z_R`,
/// `Z_R' = ± f mu^{-1/2} (1+t^2)^{-1/4} Z_NR`.
/// `initial.t` is ignored and set to `-mu`.
pub fn legendre_model(
    mu: f64,
    f_profile: impl Fn(f64) -> f64,
    initial: TwoModeState,
    kind: LegendreKind,
    solver: &Solver,
) -> Result<LegendreReport> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Domain(format!("mu must be positive, got {mu}")));
    }
    let back = match kind {
        LegendreKind::Envelope => 1.0,
        LegendreKind::Signed => -1.0,
    };
    let smu = mu.sqrt();
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let f = f_profile(t);
        let w = 1.0 + t * t;
        let q = w.sqrt().sqrt();
        dy[0] = back * f / (smu * q) * y[1];
        dy[1] = f * smu / (q * q * q) * y[0];
        dy[2] = f / (q * q);
    };
    let t0 = -mu;
    let start = TwoModeState { t: t0, ..initial };
    let e0 = legendre_energy(mu, start);
    let mut sup_ratio: f64 = 1.0;
    let mut check: f64 = 0.0;
    let mut check2: f64 = 0.0;
    let mut f_sup: f64 = 0.0;
    let (ys, _) = solver.integrate(
        rhs,
        t0,
        &[start.z_r, start.z_nr, 0.0],
        &[mu],
        |ev| {
            let s = TwoModeState { z_r: ev.y[0], z_nr: ev.y[1], t: ev.t };
            f_sup = f_sup.max(f_profile(ev.t).abs());
            if e0 > 0.0 {
                let e = legendre_energy(mu, s);
                sup_ratio = sup_ratio.max(e / e0);
                check = check.max(e / (ev.y[2].exp() * e0));
                check2 = check2.max(e / ((2.0 * ev.y[2]).exp() * e0));
            }
            Ok(())
        },
    )?;
    let y = &ys[0];
    let fin = TwoModeState { z_r: y[0], z_nr: y[1], t: mu };
    let gamma_energy = (sup_ratio.ln() / mu.ln()).max(0.0);
    let scale = f_sup * mu.powf(0.5 + gamma_energy);
    let delta_nr = (fin.z_nr - start.z_nr).abs();
    let delta_r = (fin.z_r - start.z_r).abs();
    let ratio = |d: f64, a: f64, b: f64| {
        let denom = scale * (a.abs() + f_sup * b.abs());
        if denom > 0.0 {
            d / denom
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    };
    Ok(LegendreReport {
        mu,
        kind,
        initial: start,
        final_state: fin,
        f_sup,
        delta_nr,
        delta_r,
        gamma_energy,
        nr_bound_ratio: ratio(delta_nr, start.z_r, start.z_nr),
        r_bound_ratio: ratio(delta_r, start.z_nr, start.z_r),
        energy_check: check,
        energy_check_doubled: check2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub mus: Vec<f64>,
    pub z_nr: Vec<f64>,
    pub exponent: f64,
    pub r2: f64,
}

/// Log-log slope of `|Z_NR(mu)|` over the given `mu`, for constant `f` and
/// initial data `(Z_R, Z_NR) = (1, 0)`.
pub fn legendre_exponent(mus: &[f64], f: f64, kind: LegendreKind, solver: &Solver) -> Result<ExponentFit> {
    let init = TwoModeState { z_r: 1.0, z_nr: 0.0, t: 0.0 };
    let mut z = Vec::with_capacity(mus.len());
    for &mu in mus {
        z.push(legendre_model(mu, |_| f, init, kind, solver)?.final_state.z_nr.abs());
    }
    let lx: Vec<f64> = mus.iter().map(|m| m.ln()).collect();
    let ly: Vec<f64> = z.iter().map(|v| v.ln()).collect();
    let fit = fit_line(&lx, &ly).ok_or_else(|| Error::Domain("need at least two distinct mu".into()))?;
    Ok(ExponentFit {
        mus: mus.to_vec(),
        z_nr: z,
        exponent: fit.slope,
        r2: fit.r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_value() {
        let k = resonance_kernel_integral();
        assert!((k.value - k.reference).abs() < 1e-9);
        assert!((k.reference - 5.244_115_108_584_24).abs() < 1e-12);
    }

    #[test]
    fn tail_expansion_against_quadrature() {
        let w = 50.0;
        let q = quadrature::integrate(|s| (1.0 + s * s).powf(-0.75), w, 1e7, 1e-14, 1e-13, 4000);
        let far = kernel_tail(1e7);
        assert!((q.value + far - kernel_tail(w)).abs() < 1e-11);
    }

    #[test]
    fn toy_rejects_small_mu() {
        assert!(toy_growth(500.0, 3, 1e-3, 1.0).is_err());
        assert!(toy_growth(1e4, 0, 1e-3, 1.0).is_err());
    }

    #[test]
    fn toy_is_linear() {
        assert_eq!(toy_growth(1e4, 5, 1e-3, 0.0).unwrap().z_nr, 0.0);
        let a = toy_growth(1e4, 5, 1e-3, 1.0).unwrap();
        let b = toy_growth(1e4, 5, 1e-3, 2.5).unwrap();
        assert!((b.z_nr - 2.5 * a.z_nr).abs() < 1e-14 * b.z_nr.abs());
    }

    #[test]
    fn legendre_zero_forcing() {
        let init = TwoModeState { z_r: 0.7, z_nr: -0.2, t: 0.0 };
        let r = legendre_model(100.0, |_| 0.0, init, LegendreKind::Envelope, &Solver::default()).unwrap();
        assert_eq!(r.final_state.z_r, 0.7);
        assert_eq!(r.final_state.z_nr, -0.2);
    }

    #[test]
    fn legendre_energy_is_continuous_at_zero() {
        let s = TwoModeState { z_r: 0.3, z_nr: 2.0, t: 0.0 };
        let before = legendre_energy(100.0, TwoModeState { t: -1e-12, ..s });
        assert!((legendre_energy(100.0, s) - before).abs() < 1e-12);
    }
}
