//! The two reduced models of one resonance: the frozen-resonant toy and
//! the two-mode Legendre-type system.
//!
//! cargo run --release --example toy_kernel

use echo_lattice::ode::Solver;
use echo_lattice::toy::{legendre_exponent, resonance_kernel_integral, toy_growth, LegendreKind};

fn main() -> echo_lattice::Result<()> {
    let k = resonance_kernel_integral();
    println!("kernel: {:.10} (reference {:.10}, tail {:.3e})", k.value, k.reference, k.tail);

    println!("\n{:>8} {:>3} {:>10} {:>8}", "mu", "k", "z_nr", "ratio");
    for mu in [1e2, 1e3, 1e4] {
        for k in [1u64, 2, 5] {
            let xi = mu * (k * k) as f64;
            let g = toy_growth(xi, k, 1e-3, 1.0)?;
            println!("{mu:>8} {k:>3} {:>10.4e} {:>8.4}", g.z_nr, g.ratio);
        }
    }

    let solver = Solver::with_tolerances(1e-10, 1e-12);
    for kind in [LegendreKind::Envelope, LegendreKind::Signed] {
        let fit = legendre_exponent(&[1e2, 1e3, 1e4], 0.05, kind, &solver)?;
        println!("\n{kind:?}: |Z_NR(mu)| ~ mu^{:.4} (r2 = {:.4})", fit.exponent, fit.r2);
    }
    Ok(())
}
