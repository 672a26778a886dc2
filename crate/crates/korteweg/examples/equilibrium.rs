//! The far-field state (1, 0) is an exact discrete fixed point: run ten
//! thousand steps and watch nothing move.
//!
//!     cargo run --example equilibrium

use korteweg::integrate::{stable_dt, RunConfig, Stepper};
use korteweg::model::{ModelKind, ModelParams};
use korteweg::{RadialGrid, State};

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
    let grid = RadialGrid::new(512, 16.0).unwrap();
    let mut state = State::equilibrium(&grid, &params).unwrap();
    let dt = stable_dt(&state, &grid, &params, &RunConfig::default());
    println!("n = {}, dx = {:.4e}, stable dt = {:.4e}", grid.n(), grid.dx(), dt);

    let mut stepper = Stepper::new(&grid);
    let steps = 10_000;
    let start = std::time::Instant::now();
    for _ in 0..steps {
        state = stepper.step(&state, &grid, &params, dt, 1e-9, None).unwrap();
    }
    let max_dv = state.v.iter().map(|v| (v - 1.0).abs()).fold(0.0f64, f64::max);
    let max_u = state.u.iter().map(|u| u.abs()).fold(0.0f64, f64::max);
    println!(
        "{steps} steps to t = {:.4e} in {:.2?}: max|v-1| = {max_dv:.3e}, max|u| = {max_u:.3e}",
        state.t,
        start.elapsed()
    );
}
