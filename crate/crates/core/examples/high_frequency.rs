//! Frequencies above `2 C_alpha eps^-4` and the small-time window: the
//! lattice stays within a fixed multiple of its initial size.
//!
//! cargo run --release --example high_frequency

use echo_lattice::coupled::ModelVariant;
use echo_lattice::experiment::scenarios::{high_frequency, small_time, InitialData};
use echo_lattice::homogeneous::{estimate_c_alpha, CAlphaGrid};
use echo_lattice::mode_lattice::Params;
use echo_lattice::ode::Solver;

fn main() -> echo_lattice::Result<()> {
    let solver = Solver::with_tolerances(1e-8, 1e-10);
    let c = estimate_c_alpha(1.0, CAlphaGrid::default(), &Solver::with_tolerances(1e-10, 1e-12))?.value;
    println!("C_1 = {c:.4}");

    // The transport terms of the full model are of size f xi near t = 0,
    // which at these frequencies needs a much wider lattice.
    let p = Params { epsilon: 0.3, k_trunc: 32, enforce_regime: false, ..Params::default() };
    let hf = high_frequency(&p, ModelVariant::Simplified, c, InitialData::spread(3), &solver)?;
    println!("high frequency: xi = {:.0}, T = {:.0}, sup ratio {:.4} <= {:.4}", hf.xi, hf.t_end, hf.sup_ratio, hf.bound);

    let p = Params { xi: 1e4, epsilon: 0.05, k_trunc: 16, enforce_regime: false, ..Params::default() };
    let st = small_time(&p, ModelVariant::Simplified, c, InitialData::spread(3), &solver)?;
    println!("small time: xi = {:.0}, T = {:.2}, sup ratio {:.4} <= {:.4}", st.xi, st.t_end, st.sup_ratio, st.bound);
    Ok(())
}
