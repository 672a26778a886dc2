//! ASCII map of the admissible (α, β) regions of both viscosity families at
//! fixed γ, plus a CSV raster for external plotting.
//!
//!     cargo run --example regime_map [gamma]

use korteweg::model::ModelKind;
use korteweg::output::write_raster_csv;
use korteweg::regime::sweep_regions;
use std::path::Path;

fn main() {
    let gamma: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(4.0);
    let alpha_range = (-3.0, 1.0);
    let beta_range = (-6.5, -1.5);
    let (na, nb) = (72usize, 36usize);

    for kind in [ModelKind::Kazhikhov, ModelKind::DensityDependent] {
        let grid = sweep_regions(alpha_range, beta_range, gamma, kind, (na, nb)).unwrap();
        println!("\n{} family, gamma = {gamma}", kind.label());
        println!("alpha from {} to {}, beta from {} (top) to {} (bottom)",
            alpha_range.0, alpha_range.1, beta_range.0, beta_range.1);
        for row in 0..nb {
            let mut line = String::with_capacity(na);
            for col in 0..na {
                let v = &grid[row * na + col];
                let cases = v.matched_cases();
                line.push(match cases.first() {
                    None => '.',
                    Some(c) => match c.as_str() {
                        "i" => '1',
                        "ii" => '2',
                        "iii" => '3',
                        "iv" => '4',
                        _ => '5',
                    },
                });
            }
            println!("  {line}");
        }
        let matched = grid.iter().filter(|v| v.is_matched()).count();
        println!("  {matched}/{} cells matched (digits mark the first matched case)", grid.len());

        let path = format!("regime_map_{}.csv", kind.label());
        write_raster_csv(Path::new(&path), &grid, kind).unwrap();
        println!("  raster written to {path}");
    }
}
