//! Time integration: classical four-stage Runge–Kutta with a stiffness-aware
//! step-size controller, positivity enforcement by abort, and the main run
//! loop.
//!
//! The radius field is held frozen within the stages of a step and refreshed
//! from the updated volume afterwards, which keeps r and v exactly compatible
//! with the conserved-form reconstruction. Boundary values are re-imposed
//! after every stage so stage states remain admissible inputs for the spatial
//! operator.
//!
//! Positivity is handled by abort, never clamping: a volume below the
//! configured floor terminates the run with [`Termination::PositivityFault`].

use crate::geometry::{radius_from_state, RadialGrid};
use crate::model::{ModelKind, ModelParams};
use crate::num::powr;
use crate::spatial::{rhs_into, RhsScratch, State};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Runtime controls for [`run`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub t_end: f64,
    /// Safety factor for the viscous (parabolic) step-size bound, in (0, 1].
    pub cfl_visc: f64,
    /// Safety factor for the capillary (dispersive) bound, in (0, 1].
    pub cfl_cap: f64,
    /// Controller floor; a smaller stable step terminates with DtUnderflow.
    pub dt_min: f64,
    /// Upper cap applied to the very first step.
    pub dt_init: f64,
    /// Positivity abort threshold for the specific volume.
    pub v_floor: f64,
    /// Diagnostics cadence in accepted steps.
    pub snapshot_every: usize,
    /// Bypass the controller with a fixed step (used by convergence ladders
    /// and the fault-semantics checks).
    pub dt_fixed: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            t_end: 1.0,
            cfl_visc: 0.4,
            cfl_cap: 0.25,
            dt_min: 1e-12,
            dt_init: 1e-3,
            v_floor: 1e-6,
            snapshot_every: 100,
            dt_fixed: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end >= 0.0) {
            return Err(Error::domain("t_end must be non-negative".to_string()));
        }
        for (name, x) in [("cfl_visc", self.cfl_visc), ("cfl_cap", self.cfl_cap)] {
            if !(x > 0.0 && x <= 1.0) {
                return Err(Error::domain(format!("{name} must lie in (0, 1], got {x}")));
            }
        }
        if !(self.dt_min > 0.0) {
            return Err(Error::domain("dt_min must be positive".to_string()));
        }
        if self.dt_min > self.dt_init {
            return Err(Error::domain(format!(
                "dt_min ({}) must not exceed dt_init ({})",
                self.dt_min, self.dt_init
            )));
        }
        if !(self.v_floor > 0.0) {
            return Err(Error::domain("v_floor must be positive".to_string()));
        }
        if self.snapshot_every == 0 {
            return Err(Error::domain("snapshot_every must be >= 1".to_string()));
        }
        Ok(())
    }
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Completed,
    PositivityFault,
    DtUnderflow,
    NonFinite,
}

impl Termination {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::PositivityFault => "positivity-fault",
            Termination::DtUnderflow => "dt-underflow",
            Termination::NonFinite => "non-finite",
        }
    }

    /// Process exit code contract: 0 completed, 3 positivity, 4 dt underflow,
    /// 5 non-finite.
    pub fn exit_code(&self) -> i32 {
        match self {
            Termination::Completed => 0,
            Termination::PositivityFault => 3,
            Termination::DtUnderflow => 4,
            Termination::NonFinite => 5,
        }
    }
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// A step-level failure.
#[derive(Debug, Clone)]
pub struct Fault {
    pub termination: Termination,
    pub message: String,
}

/// End-of-run report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub termination: Termination,
    pub steps: usize,
    pub v_min_global: f64,
    pub v_max_global: f64,
    pub final_time: f64,
    pub fault_message: Option<String>,
}

/// Observer contract of the run loop. `on_step` fires after every accepted
/// step; `on_snapshot` fires synchronously with a read-only view of the state
/// every `snapshot_every` accepted steps (and for the initial and final
/// states).
pub trait DiagnosticsSink {
    fn on_step(&mut self, _step: usize, _dt: f64, _before: &State, _after: &State) {}
    fn on_snapshot(&mut self, _step: usize, _t: f64, _state: &State) {}
}

/// Sink that ignores everything.
pub struct NullSink;

impl DiagnosticsSink for NullSink {}

/// Optional forcing fields (dv/dt, du/dt additions) evaluated at a stage time.
pub type Forcing<'a> = &'a dyn Fn(f64) -> (Vec<f64>, Vec<f64>);

/// Largest step the explicit scheme tolerates on this state.
///
/// Three bounds are combined: the parabolic bound dx²·cfl_visc/ν with
/// ν = (2μ(v)+λ(v))·r²ᵐ/v, the dispersive bound dx²·cfl_cap/√K with
/// K = r⁴ᵐ·v^{−(β+5)} the composed capillary coefficient of the nested
/// stencil, and a hard cap dx²·(min v)^{(β+5)/2}/max(r²ᵐ) with the exponent
/// clamped to be non-negative.
pub fn stable_dt(state: &State, grid: &RadialGrid, params: &ModelParams, config: &RunConfig) -> f64 {
    let m = params.m() as i32;
    let mut nu_max: f64 = 0.0;
    let mut cap_max: f64 = 0.0;
    let mut v_min = f64::INFINITY;
    let mut r2m_max: f64 = 0.0;
    for (&v, &r) in state.v.iter().zip(&state.r) {
        let r2m = r.powi(2 * m);
        let visc = match params.kind {
            ModelKind::Kazhikhov => {
                2.0 * params.mu_tilde + params.lambda_tilde * powr(v, -params.alpha)
            }
            ModelKind::DensityDependent => {
                (2.0 * params.mu_tilde + params.lambda_tilde) * powr(v, -params.alpha)
            }
        };
        nu_max = nu_max.max(visc.abs() * r2m / v);
        cap_max = cap_max.max(r2m * r2m * powr(v, -(params.beta + 5.0)));
        v_min = v_min.min(v);
        r2m_max = r2m_max.max(r2m);
    }
    let dx2 = grid.dx() * grid.dx();
    let dt_visc = config.cfl_visc * dx2 / nu_max.max(f64::MIN_POSITIVE);
    let dt_cap = config.cfl_cap * dx2 / cap_max.sqrt().max(f64::MIN_POSITIVE);
    let hard_exp = (0.5 * (params.beta + 5.0)).max(0.0);
    let dt_hard = dx2 * powr(v_min, hard_exp) / r2m_max.max(f64::MIN_POSITIVE);
    dt_visc.min(dt_cap).min(dt_hard)
}

/// Reusable stepper: owns the stage buffers of the Runge–Kutta scheme.
pub struct Stepper {
    scratch: RhsScratch,
    stage_v: Vec<f64>,
    stage_u: Vec<f64>,
    kv: [Vec<f64>; 4],
    ku: [Vec<f64>; 4],
}

impl Stepper {
    pub fn new(grid: &RadialGrid) -> Self {
        let z = vec![0.0; grid.n()];
        Stepper {
            scratch: RhsScratch::default(),
            stage_v: z.clone(),
            stage_u: z.clone(),
            kv: [z.clone(), z.clone(), z.clone(), z.clone()],
            ku: [z.clone(), z.clone(), z.clone(), z],
        }
    }

    /// One classical RK4 step with optional forcing, frozen radius, and
    /// per-stage boundary re-imposition.
    pub fn step(
        &mut self,
        state: &State,
        grid: &RadialGrid,
        params: &ModelParams,
        dt: f64,
        v_floor: f64,
        forcing: Option<Forcing<'_>>,
    ) -> std::result::Result<State, Fault> {
        let n = grid.n();
        debug_assert!(dt > 0.0);
        // stage offsets of the classical scheme
        const STAGE_DT: [f64; 4] = [0.0, 0.5, 0.5, 1.0];
        for s in 0..4 {
            if s == 0 {
                self.stage_v.copy_from_slice(&state.v);
                self.stage_u.copy_from_slice(&state.u);
            } else {
                let c = STAGE_DT[s] * dt;
                let (kvp, kup) = (&self.kv[s - 1], &self.ku[s - 1]);
                for i in 0..n {
                    self.stage_v[i] = state.v[i] + c * kvp[i];
                    self.stage_u[i] = state.u[i] + c * kup[i];
                }
                impose_bc(&mut self.stage_v, &mut self.stage_u);
            }
            check_stage(&self.stage_v, &self.stage_u)?;
            rhs_into(
                &self.stage_v,
                &self.stage_u,
                &state.r,
                grid,
                params,
                &mut self.kv[s],
                &mut self.ku[s],
                &mut self.scratch,
            )
            .map_err(|e| Fault {
                termination: Termination::PositivityFault,
                message: e.to_string(),
            })?;
            if let Some(f) = forcing {
                let (sv, su) = f(state.t + STAGE_DT[s] * dt);
                let (kv, ku) = (&mut self.kv[s], &mut self.ku[s]);
                for i in 0..n {
                    kv[i] += sv[i];
                    ku[i] += su[i];
                }
                // tendencies at pinned boundary nodes stay zero
                kv[n - 1] = 0.0;
                ku[0] = 0.0;
                ku[n - 1] = 0.0;
            }
        }
        let mut v = state.v.clone();
        let mut u = state.u.clone();
        let w = dt / 6.0;
        for i in 0..n {
            v[i] += w * (self.kv[0][i] + 2.0 * self.kv[1][i] + 2.0 * self.kv[2][i] + self.kv[3][i]);
            u[i] += w * (self.ku[0][i] + 2.0 * self.ku[1][i] + 2.0 * self.ku[2][i] + self.ku[3][i]);
        }
        impose_bc(&mut v, &mut u);
        for i in 0..n {
            if !v[i].is_finite() || !u[i].is_finite() {
                return Err(Fault {
                    termination: Termination::NonFinite,
                    message: format!("non-finite field value at node {i} after step"),
                });
            }
        }
        if let Some((i, &vi)) = v.iter().enumerate().find(|(_, &vi)| vi < v_floor) {
            return Err(Fault {
                termination: Termination::PositivityFault,
                message: format!("v[{i}] = {vi} fell below the floor {v_floor}"),
            });
        }
        let r = radius_from_state(&v, grid, params).map_err(|e| Fault {
            termination: Termination::PositivityFault,
            message: e.to_string(),
        })?;
        Ok(State {
            t: state.t + dt,
            v,
            u,
            r,
        })
    }
}

fn impose_bc(v: &mut [f64], u: &mut [f64]) {
    let n = v.len();
    u[0] = 0.0;
    v[n - 1] = 1.0;
    u[n - 1] = 0.0;
}

fn check_stage(v: &[f64], u: &[f64]) -> std::result::Result<(), Fault> {
    for (i, &vi) in v.iter().enumerate() {
        if !vi.is_finite() {
            return Err(Fault {
                termination: Termination::NonFinite,
                message: format!("non-finite stage volume at node {i}"),
            });
        }
        if vi <= 0.0 {
            return Err(Fault {
                termination: Termination::PositivityFault,
                message: format!("stage volume v[{i}] = {vi} is not positive"),
            });
        }
    }
    if let Some((i, _)) = u.iter().enumerate().find(|(_, x)| !x.is_finite()) {
        return Err(Fault {
            termination: Termination::NonFinite,
            message: format!("non-finite stage velocity at node {i}"),
        });
    }
    Ok(())
}

/// One RK4 step (allocating convenience wrapper around [`Stepper`]).
pub fn step(
    state: &State,
    grid: &RadialGrid,
    params: &ModelParams,
    dt: f64,
) -> std::result::Result<State, Fault> {
    Stepper::new(grid).step(state, grid, params, dt, f64::MIN_POSITIVE, None)
}

/// Main run loop. Deterministic for fixed inputs; every accepted step goes
/// through the sink, snapshots at the configured cadence.
pub fn run(
    initial: State,
    grid: &RadialGrid,
    params: &ModelParams,
    config: &RunConfig,
    sink: &mut dyn DiagnosticsSink,
) -> Result<RunSummary> {
    run_driver(initial, grid, params, config, sink, None)
}

/// Run loop with forcing; used by the manufactured-solution ladders.
pub fn run_forced(
    initial: State,
    grid: &RadialGrid,
    params: &ModelParams,
    config: &RunConfig,
    sink: &mut dyn DiagnosticsSink,
    forcing: Forcing<'_>,
) -> Result<RunSummary> {
    run_driver(initial, grid, params, config, sink, Some(forcing))
}

fn run_driver(
    initial: State,
    grid: &RadialGrid,
    params: &ModelParams,
    config: &RunConfig,
    sink: &mut dyn DiagnosticsSink,
    forcing: Option<Forcing<'_>>,
) -> Result<RunSummary> {
    config.validate()?;
    if initial.v.len() != grid.n() || initial.u.len() != grid.n() || initial.r.len() != grid.n() {
        return Err(Error::domain("initial state does not match the grid".to_string()));
    }
    let mut summary = RunSummary {
        termination: Termination::Completed,
        steps: 0,
        v_min_global: initial.v_min(),
        v_max_global: initial.v_max(),
        final_time: initial.t,
        fault_message: None,
    };
    let mut state = initial;
    sink.on_snapshot(0, state.t, &state);

    let t_tol = 1e-12 * config.t_end.max(1.0);
    let mut stepper = Stepper::new(grid);
    while state.t < config.t_end - t_tol {
        let dt_ctrl = match config.dt_fixed {
            Some(dt) => dt,
            None => {
                let mut dt = stable_dt(&state, grid, params, config);
                if summary.steps == 0 {
                    dt = dt.min(config.dt_init);
                }
                dt
            }
        };
        if dt_ctrl < config.dt_min {
            summary.termination = Termination::DtUnderflow;
            summary.fault_message = Some(format!(
                "stable step {dt_ctrl} fell below dt_min = {}",
                config.dt_min
            ));
            break;
        }
        let dt = dt_ctrl.min(config.t_end - state.t);
        match stepper.step(&state, grid, params, dt, config.v_floor, forcing) {
            Ok(next) => {
                summary.steps += 1;
                summary.v_min_global = summary.v_min_global.min(next.v_min());
                summary.v_max_global = summary.v_max_global.max(next.v_max());
                sink.on_step(summary.steps, dt, &state, &next);
                state = next;
                let at_end = state.t >= config.t_end - t_tol;
                if summary.steps % config.snapshot_every == 0 || at_end {
                    sink.on_snapshot(summary.steps, state.t, &state);
                }
            }
            Err(fault) => {
                summary.termination = fault.termination;
                summary.fault_message = Some(fault.message);
                break;
            }
        }
    }
    summary.final_time = state.t;
    Ok(summary)
}
