//! Manufactured-solution verification: spatial consistency order of the
//! discrete operator and full space-time order of forced runs.
//!
//!     cargo run --example mms_convergence

use korteweg::model::{ModelKind, ModelParams};
use korteweg::verify::{mms_full_order, mms_spatial_order, FullOrderVerdict, ManufacturedCase};

fn main() {
    let case = ManufacturedCase::bump();
    println!("spatial consistency (residual of rhs + forcing against the exact tendency):");
    for kind in [ModelKind::Kazhikhov, ModelKind::DensityDependent] {
        for dim in [2u32, 3] {
            let params = ModelParams {
                kind,
                alpha: 1.0,
                beta: -2.5,
                gamma: 1.4,
                mu_tilde: 1.0,
                lambda_tilde: 0.5,
                dim,
                a: 1.0,
            };
            let report = mms_spatial_order(&case, &params, &[96, 144, 216, 324]).unwrap();
            print!("  {} d={dim}:", kind.label());
            for level in &report.levels {
                print!(" n={} res={:.3e}", level.n, level.residual());
            }
            println!("  -> order {:.3}", report.order);
        }
    }

    let params = ModelParams {
        kind: ModelKind::Kazhikhov,
        alpha: 1.0,
        beta: -2.5,
        gamma: 1.4,
        mu_tilde: 1.0,
        lambda_tilde: 0.5,
        dim: 2,
        a: 1.0,
    };
    let dt0 = 2.0e-4;
    let ladder: Vec<(usize, f64)> = [64usize, 96, 144]
        .iter()
        .map(|&n| (n, dt0 * (63.0 / (n as f64 - 1.0)).powi(2)))
        .collect();
    println!("\nfull space-time ladder (dt scaled with dx², forced run to t = 0.02):");
    let report = mms_full_order(&case, &params, &ladder, 0.02).unwrap();
    for level in &report.levels {
        println!("  n={:>4} dt={:.3e} error={:.3e}", level.n, level.dt, level.error);
    }
    match report.verdict {
        FullOrderVerdict::Order(q) => println!("  -> order {q:.3}"),
        other => println!("  -> {other:?}"),
    }
}
