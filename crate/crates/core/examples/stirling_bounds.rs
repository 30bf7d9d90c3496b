//! The echo product `G(xi, eps)` against its exponential bounds, and the
//! Gevrey weight that absorbs it.
//!
//! cargo run --release --example stirling_bounds

use echo_lattice::growth::{fit_stirling_constant, growth_product, stirling_bounds, GevreyWeight};

fn main() -> echo_lattice::Result<()> {
    let eps: f64 = 1e-2;
    let sigmas = [1.5, 2.0, 2.5, 3.0, 3.5, 3.9];
    let pts: Vec<(f64, f64)> = sigmas.iter().map(|s| (eps.powf(-s), eps)).collect();
    let log_c = fit_stirling_constant(&pts)?;
    println!("fitted log C = {log_c:.4}");
    println!("{:>5} {:>10} {:>6} {:>10} {:>10} {:>10}", "sigma", "xi", "terms", "log G", "upper", "lower");
    for (s, &(xi, _)) in sigmas.iter().zip(&pts) {
        let g = growth_product(xi, eps)?;
        let b = stirling_bounds(xi, eps, log_c)?;
        println!(
            "{s:>5} {xi:>10.3e} {:>6} {:>10.3} {:>10.3} {:>10.3}",
            g.terms(),
            b.log_g,
            b.upper_log,
            b.lower_log
        );
    }
    let w = GevreyWeight { c: 1.0, gamma: 0.0, epsilon: eps };
    println!("\nGevrey log weight at xi = 1e6: {:.3} (cap {:.1})", w.log_weight(1e6), w.log_cap());
    Ok(())
}
