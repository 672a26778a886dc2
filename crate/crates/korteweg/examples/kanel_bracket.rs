//! Pointwise volume bracket from the Kanel functional: invert
//! |Υ(v*)| = ‖√Ψ(v)‖·‖v_x/v^{(β+5)/2}‖ on both sides of v = 1 and compare
//! the prediction with the observed range of v along a run.
//!
//!     cargo run --example kanel_bracket

use korteweg::config::{build_initial_state, FieldSpec, InitialSpec};
use korteweg::diagnostics::LedgerTracker;
use korteweg::integrate::{run, RunConfig};
use korteweg::model::{ModelKind, ModelParams};
use korteweg::RadialGrid;

fn main() {
    let params = ModelParams {
        kind: ModelKind::Kazhikhov,
        alpha: 1.0,
        beta: -2.5, // the two-sided band needs beta in [-3, -2]
        gamma: 2.0,
        mu_tilde: 0.75,
        lambda_tilde: 0.0,
        dim: 2,
        a: 1.0,
    };
    let grid = RadialGrid::new(256, 48.0).unwrap();
    let initial = build_initial_state(
        &InitialSpec::Fields {
            v: FieldSpec::GaussianBump {
                center: 10.0,
                width: 1.4,
                amplitude: 0.2,
            },
            u: FieldSpec::Constant(0.0),
        },
        &grid,
        &params,
    )
    .unwrap();

    let config = RunConfig {
        t_end: 0.4,
        snapshot_every: 800,
        ..RunConfig::default()
    };
    let mut tracker = LedgerTracker::new(grid, params).with_accumulation_stride(4);
    run(initial, &grid, &params, &config, &mut tracker).unwrap();

    println!(
        "{:>10} {:>10} {:>10} {:>10} {:>10} {:>9}",
        "t", "lower", "v_min", "v_max", "upper", "inside"
    );
    for row in tracker.rows() {
        let lo = row.kanel_lower.unwrap_or(f64::NAN);
        let hi = row.kanel_upper.unwrap_or(f64::NAN);
        let inside = lo <= row.v_min && row.v_max <= hi;
        println!(
            "{:>10.5} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>9}",
            row.t, lo, row.v_min, row.v_max, hi, inside
        );
    }
    let (lo, hi) = tracker.bracket_envelope();
    println!(
        "\nworst-case envelope over the run: [{:.6}, {:.6}]",
        lo.unwrap_or(f64::NAN),
        hi.unwrap_or(f64::NAN)
    );
}
