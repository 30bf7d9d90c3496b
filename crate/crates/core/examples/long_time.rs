//! Beyond `t = 2 xi` no resonance is left; the `|k| = 1` modes keep
//! drifting while the rest settle.
//!
//! cargo run --release --example long_time

use echo_lattice::coupled::ModelVariant;
use echo_lattice::experiment::scenarios::{long_time, InitialData};
use echo_lattice::mode_lattice::Params;
use echo_lattice::ode::Solver;

fn main() -> echo_lattice::Result<()> {
    let solver = Solver::with_tolerances(1e-8, 1e-10);
    let p = Params { xi: 100.0, epsilon: 0.05, k_trunc: 8, ..Params::default() };
    for variant in [ModelVariant::Simplified, ModelVariant::Full] {
        let out = long_time(&p, variant, 400.0, InitialData::spread(3), &solver)?;
        println!(
            "{variant:?}: t in [{}, {}], exponent |k|!=1 {:.3}, |k|=1 {:.3}, log growth {:.4}",
            out.t_start, out.t_end, out.exponent_rest, out.exponent_k1, out.log_total
        );
    }
    Ok(())
}
