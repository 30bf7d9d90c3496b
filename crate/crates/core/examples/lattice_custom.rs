//! Build a lattice state by hand, integrate it against the wave and print
//! the mode profile at a few times.
//!
//! cargo run --release --example lattice_custom

use echo_lattice::coupled::{integrate_lattice, ModelVariant, RecordSpec};
use echo_lattice::mode_lattice::{LatticeState, ModeState, Params};
use echo_lattice::ode::Solver;
use echo_lattice::wave::WaveTrajectory;

fn main() -> echo_lattice::Result<()> {
    let xi = 400.0;
    let p = Params { xi, epsilon: 0.05, k_trunc: 16, t_end: Some(140.0), enforce_regime: false, ..Params::default() };
    let solver = Solver::with_tolerances(1e-9, 1e-11);
    let wave = WaveTrajectory::dense(p.alpha, p.epsilon, 140.0, &Solver::with_tolerances(1e-12, 1e-15))?;
    let mut s = LatticeState::zeros(xi, p.k_trunc, 60.0);
    *s.mode_mut(5).unwrap() = ModeState::real(1.0, 0.0);
    let spec = RecordSpec { times: vec![80.0, 100.0, 120.0, 140.0], include_partition: false, keep_states: true, ..RecordSpec::default() };
    let run = integrate_lattice(ModelVariant::Full, &p, &s, (60.0, 140.0), &spec, &wave, &solver)?;
    for st in &run.states {
        let profile: Vec<String> = (2..=6).map(|k| format!("{:.2e}", st.mode(k).unwrap().norm())).collect();
        println!("t = {:>5.1}: |k=2..6| = [{}]", st.t, profile.join(", "));
    }
    println!("steps: {:?}", run.stats);
    Ok(())
}
