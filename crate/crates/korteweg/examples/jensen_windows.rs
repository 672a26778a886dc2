//! Convexity (Jensen) window diagnostics: per-window cell averages of the
//! volume against the window's own Φ-mass, with the roots of Φ(x) = level
//! that bracket every admissible average.
//!
//!     cargo run --example jensen_windows

use korteweg::diagnostics::{jensen_check, phi_roots};
use korteweg::RadialGrid;

fn main() {
    let gamma = 2.0;
    let grid = RadialGrid::new(257, 8.0).unwrap();
    let v: Vec<f64> = (0..grid.n())
        .map(|i| {
            let x = grid.node(i);
            1.0 + 0.6 * (-((x - 4.0) / 0.8f64).powi(2)).exp()
        })
        .collect();

    let windows = jensen_check(&v, &grid, gamma, 33).unwrap();
    println!(
        "{:>6} {:>6} {:>9} {:>12} {:>12} {:>8} {:>8} {:>6}",
        "first", "last", "mean v", "phi(mean)", "mean phi", "alpha1", "alpha2", "holds"
    );
    for w in &windows {
        println!(
            "{:>6} {:>6} {:>9.5} {:>12.5e} {:>12.5e} {:>8.4} {:>8.4} {:>6}",
            w.first_node, w.last_node, w.mean_v, w.phi_of_mean, w.mean_phi, w.alpha1, w.alpha2, w.holds
        );
    }

    // the classic quadratic sanity check: Φ(x) = 1/2 at γ = 2 has roots
    // x + 1/x - 2 = 1/2, i.e. {1/2, 2}
    let (a1, a2) = phi_roots(0.5, 2.0);
    println!("\nroots of phi(x) = 0.5 at gamma = 2: ({a1:.12}, {a2:.12})");
}
