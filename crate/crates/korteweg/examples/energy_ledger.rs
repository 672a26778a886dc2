//! Discrete energy ledger of a Gaussian-bump run: total energy, accumulated
//! dissipation, boundary flux and the balance defect, printed per snapshot.
//!
//!     cargo run --example energy_ledger

use korteweg::config::{build_initial_state, FieldSpec, InitialSpec};
use korteweg::diagnostics::LedgerTracker;
use korteweg::integrate::{run, RunConfig};
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
    let grid = RadialGrid::new(384, 48.0).unwrap();
    let initial = build_initial_state(
        &InitialSpec::Fields {
            v: FieldSpec::GaussianBump {
                center: 10.0,
                width: 1.4,
                amplitude: 0.15,
            },
            u: FieldSpec::Constant(0.0),
        },
        &grid,
        &params,
    )
    .unwrap();

    let config = RunConfig {
        t_end: 0.25,
        snapshot_every: 1500,
        ..RunConfig::default()
    };
    let mut tracker = LedgerTracker::new(grid, params)
        .with_accumulation_stride(4)
        .without_bracket();
    let summary = run(initial, &grid, &params, &config, &mut tracker).unwrap();

    println!("{:>8} {:>10} {:>12} {:>12} {:>12} {:>11}", "step", "t", "E", "D_cum", "leak", "defect");
    for row in tracker.rows() {
        println!(
            "{:>8} {:>10.5} {:>12.6e} {:>12.6e} {:>12.3e} {:>11.3e}",
            row.step, row.t, row.e, row.d_cum, row.boundary_leak, row.defect
        );
    }
    let ledger = tracker.ledger().unwrap();
    println!(
        "\n{} after {} steps; E + D_cum - leak - E0 = {:.3e}",
        summary.termination, summary.steps, ledger.defect
    );
}
