//! Single-mode homogeneous evolution: energy excursions against the
//! variation and Gronwall bounds, and the uniform propagator constant.
//!
//! cargo run --release --example homogeneous_propagator

use echo_lattice::homogeneous::{energy_excursion, estimate_c_alpha, propagator, CAlphaGrid};
use echo_lattice::mode_lattice::{ModeIndex, ModeState};
use echo_lattice::ode::Solver;

fn main() -> echo_lattice::Result<()> {
    let solver = Solver::with_tolerances(1e-10, 1e-12);
    let m = ModeIndex::new(1, 50.0);
    let p = propagator(1.0, m, 0.0, 200.0, &solver)?;
    println!("|S(200, 0)| for k = 1, xi = 50: {:.6}", p.op_norm());

    println!("\n{:>6} {:>10} {:>10} {:>10}", "alpha", "sup E/E0", "var bound", "gronwall");
    for alpha in [0.3, 0.5, 1.0, 5.0] {
        let e = energy_excursion(alpha, m, 0.0, 200.0, ModeState::real(1.0, 0.0), &solver)?;
        println!("{alpha:>6} {:>10.4} {:>10.4} {:>10.4}", e.sup_ratio, e.variation_bound, e.rigorous_bound);
    }

    println!("\nC_alpha over all (k, xi, t1 <= t2):");
    for alpha in [0.3, 1.0, 4.0, 16.0] {
        let c = estimate_c_alpha(alpha, CAlphaGrid::default(), &solver)?;
        println!("  alpha = {alpha:>5}: {:.4}", c.value);
    }
    Ok(())
}
