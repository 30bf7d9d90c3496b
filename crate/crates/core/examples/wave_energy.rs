//! Wave amplitudes `(f, g)` for a few stratification strengths, with the
//! energy constant and the decay envelopes.
//!
//! cargo run --release --example wave_energy

use echo_lattice::ode::Solver;
use echo_lattice::wave::{envelope_check, wave_energy, WaveTrajectory};

fn main() -> echo_lattice::Result<()> {
    let eps = 0.05;
    let solver = Solver::with_tolerances(1e-12, 1e-15);
    println!("{:>6} {:>12} {:>12} {:>10} {:>10}", "alpha", "E(0)", "E const", "f ratio", "g ratio");
    for alpha in [0.1, 0.3, 1.0, 4.0] {
        let traj = WaveTrajectory::dense(alpha, eps, 1e4, &solver)?;
        let env = envelope_check(&traj);
        let (f0, g0) = traj.eval(0.0);
        println!(
            "{alpha:>6} {:>12.4e} {:>12.4} {:>10.3} {:>10.3}{}",
            wave_energy(alpha, f0, g0, 0.0),
            traj.energy_constant(),
            env.f_ratio,
            env.g_ratio,
            if env.stable_regime { "" } else { "  (alpha <= 1/4: no envelope)" }
        );
    }

    let traj = WaveTrajectory::dense(1.0, eps, 2e3, &solver)?;
    println!("\nalpha = 1, transport shift int f/(1+t^2):");
    for t in [10.0, 100.0, 1000.0, 2000.0] {
        println!("  t = {t:>6}: {:.6e}", traj.transport_shift(t));
    }
    Ok(())
}
