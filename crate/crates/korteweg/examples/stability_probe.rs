//! Step-size controller behavior: the dx² scaling of the stable step, and
//! what happens when the controller is bypassed with an oversized step
//! (an honest fault, never a silently wrong completion).
//!
//!     cargo run --example stability_probe

use korteweg::config::{build_initial_state, FieldSpec, InitialSpec};
use korteweg::integrate::{run, stable_dt, NullSink, RunConfig};
use korteweg::model::{ModelKind, ModelParams};
use korteweg::RadialGrid;

fn main() {
    let params = ModelParams {
        kind: ModelKind::Kazhikhov,
        alpha: 1.0,
        beta: -3.0,
        gamma: 2.0,
        mu_tilde: 0.75,
        lambda_tilde: 0.0,
        dim: 2,
        a: 1.0,
    };
    let spec = InitialSpec::Fields {
        v: FieldSpec::GaussianBump {
            center: 6.0,
            width: 1.0,
            amplitude: 0.15,
        },
        u: FieldSpec::Constant(0.0),
    };
    let config = RunConfig::default();

    println!("stable step against resolution (expect dt ~ dx²):");
    let mut prev: Option<f64> = None;
    for &n in &[128usize, 256, 512, 1024] {
        let grid = RadialGrid::new(n, 16.0).unwrap();
        let state = build_initial_state(&spec, &grid, &params).unwrap();
        let dt = stable_dt(&state, &grid, &params, &config);
        let ratio = prev.map(|p| p / dt).unwrap_or(f64::NAN);
        println!("  n = {n:>5}: dt = {dt:.4e}  (previous/current = {ratio:.2})");
        prev = Some(dt);
    }

    println!("\nbypassing the controller with increasingly reckless fixed steps:");
    let grid = RadialGrid::new(256, 16.0).unwrap();
    let state = build_initial_state(&spec, &grid, &params).unwrap();
    let dt_ok = stable_dt(&state, &grid, &params, &config);
    for factor in [1.0, 16.0, 64.0, 256.0] {
        let cfg = RunConfig {
            t_end: 0.3,
            dt_fixed: Some(dt_ok * factor),
            snapshot_every: usize::MAX >> 1,
            ..RunConfig::default()
        };
        let summary = run(state.clone(), &grid, &params, &cfg, &mut NullSink).unwrap();
        println!(
            "  dt = {:.3e} ({factor:>5}x stable): {} after {} steps (exit code {})",
            dt_ok * factor,
            summary.termination,
            summary.steps,
            summary.termination.exit_code()
        );
    }
}
