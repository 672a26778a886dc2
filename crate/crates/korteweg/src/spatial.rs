//! Discrete spatial operator on the uniform mass grid.
//!
//! The momentum right-hand side is assembled in the bracketed flux form
//!
//! ```text
//! du/dt = rᵐ [ F − p(v) ]_x + sources,
//! F = (viscous stress) − (r²ᵐ v^{−(β+5)} v_x)_x − (β+5)/2 · r²ᵐ v^{−(β+6)} v_x²
//! ```
//!
//! so every term of the energy ledger maps one-to-one onto a flux in the
//! balance identity. All derivatives are centered second order; the nested
//! first-derivative stencil for the third-order capillary term has a 5-point
//! effective footprint, supported by two ghost layers on each side.
//!
//! Boundary closure: at x = 0 the volume is reflected evenly and the velocity
//! oddly (so v_x(0) = 0 and u(0) = 0 hold discretely); the radius ghost is an
//! even reflection. No second boundary condition for the third-order operator
//! is prescribed by the continuous problem, so the even reflection is the
//! closure chosen here. At x = x_max the fields are padded with the far-field
//! state (1, 0) and the radius continues along the conserved form with v = 1.

use crate::geometry::RadialGrid;
use crate::model::{ModelKind, ModelParams};
use crate::num::powr;
use crate::{Error, Result};
use serde::Serialize;

/// Number of ghost layers on each side.
pub const GHOST: usize = 2;

/// Discrete solution fields on the mass grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct State {
    /// Simulation time.
    pub t: f64,
    /// Specific volume at the nodes (must stay positive).
    pub v: Vec<f64>,
    /// Radial velocity at the nodes.
    pub u: Vec<f64>,
    /// Reconstructed radius, refreshed from v after each accepted step.
    pub r: Vec<f64>,
}

impl State {
    /// Build a state from (v, u) fields; computes the radius and imposes the
    /// boundary values exactly.
    pub fn new(
        mut v: Vec<f64>,
        mut u: Vec<f64>,
        grid: &RadialGrid,
        params: &ModelParams,
    ) -> Result<Self> {
        if v.len() != grid.n() || u.len() != grid.n() {
            return Err(Error::domain("field lengths do not match the grid".to_string()));
        }
        let n = grid.n();
        u[0] = 0.0;
        v[n - 1] = 1.0;
        u[n - 1] = 0.0;
        let r = crate::geometry::radius_from_state(&v, grid, params)?;
        Ok(State { t: 0.0, v, u, r })
    }

    /// The uniform far-field state (1, 0).
    pub fn equilibrium(grid: &RadialGrid, params: &ModelParams) -> Result<Self> {
        State::new(vec![1.0; grid.n()], vec![0.0; grid.n()], grid, params)
    }

    pub fn v_min(&self) -> f64 {
        self.v.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn v_max(&self) -> f64 {
        self.v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Fields extended by [`GHOST`] layers on each side (index shift +GHOST).
#[derive(Debug, Clone)]
pub struct GhostFields {
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub r: Vec<f64>,
}

/// Extend (v, u, r) with the boundary closure described in the module docs.
pub fn ghost_fill(v: &[f64], u: &[f64], r: &[f64], grid: &RadialGrid, params: &ModelParams) -> GhostFields {
    let n = grid.n();
    let ne = n + 2 * GHOST;
    let mut ve = vec![0.0; ne];
    let mut ue = vec![0.0; ne];
    let mut re = vec![0.0; ne];
    ve[GHOST..GHOST + n].copy_from_slice(v);
    ue[GHOST..GHOST + n].copy_from_slice(u);
    re[GHOST..GHOST + n].copy_from_slice(r);

    // x = 0: even v and r, odd u
    ve[1] = v[1];
    ve[0] = v[2];
    ue[1] = -u[1];
    ue[0] = -u[2];
    re[1] = r[1];
    re[0] = r[2];

    // x = x_max: far-field pad (1, 0); radius continued with v = 1
    let mp1 = params.m_f64() + 1.0;
    let r_end_pow = r[n - 1].powf(mp1);
    for k in 0..GHOST {
        ve[GHOST + n + k] = 1.0;
        ue[GHOST + n + k] = 0.0;
        re[GHOST + n + k] = (r_end_pow + (k as f64 + 1.0) * mp1 * grid.dx()).powf(1.0 / mp1);
    }
    GhostFields { v: ve, u: ue, r: re }
}

/// Scratch buffers for [`rhs_into`]; reuse across calls to avoid allocation
/// in the time-stepping loop.
#[derive(Debug, Default, Clone)]
pub struct RhsScratch {
    ve: Vec<f64>,
    ue: Vec<f64>,
    re: Vec<f64>,
    w: Vec<f64>,
    p: Vec<f64>,
    kappa: Vec<f64>,
    vx: Vec<f64>,
    wx: Vec<f64>,
    g: Vec<f64>,
    f: Vec<f64>,
}

fn validate_fields(v: &[f64], u: &[f64], grid: &RadialGrid) -> Result<()> {
    if grid.n() < 5 {
        return Err(Error::domain(format!(
            "spatial operator needs n >= 5 for its stencil footprint, got {}",
            grid.n()
        )));
    }
    if v.len() != grid.n() || u.len() != grid.n() {
        return Err(Error::domain("field lengths do not match the grid".to_string()));
    }
    for (i, &vi) in v.iter().enumerate() {
        if vi.is_nan() {
            return Err(Error::domain(format!("v[{i}] is NaN")));
        }
        if !(vi > 0.0) {
            return Err(Error::domain(format!("positivity fault: v[{i}] = {vi}")));
        }
    }
    if u.iter().any(|x| x.is_nan()) {
        return Err(Error::domain("velocity field contains NaN".to_string()));
    }
    Ok(())
}

/// Right-hand side of the semidiscrete system; allocating convenience wrapper.
pub fn rhs(state: &State, grid: &RadialGrid, params: &ModelParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut dv = vec![0.0; grid.n()];
    let mut du = vec![0.0; grid.n()];
    let mut scratch = RhsScratch::default();
    rhs_into(
        &state.v, &state.u, &state.r, grid, params, &mut dv, &mut du, &mut scratch,
    )?;
    Ok((dv, du))
}

/// Right-hand side into caller-provided buffers.
#[allow(clippy::too_many_arguments)]
pub fn rhs_into(
    v: &[f64],
    u: &[f64],
    r: &[f64],
    grid: &RadialGrid,
    params: &ModelParams,
    dv: &mut [f64],
    du: &mut [f64],
    scratch: &mut RhsScratch,
) -> Result<()> {
    validate_fields(v, u, grid)?;
    let n = grid.n();
    let ne = n + 2 * GHOST;
    let inv2dx = 1.0 / (2.0 * grid.dx());
    let m = params.m() as i32;
    let mf = params.m_f64();
    let beta = params.beta;
    let alpha = params.alpha;
    let gamma = params.gamma;
    let mu = params.mu_tilde;
    let lambda = params.lambda_tilde;

    let gf = ghost_fill(v, u, r, grid, params);
    scratch.ve.clear();
    scratch.ve.extend_from_slice(&gf.v);
    scratch.ue.clear();
    scratch.ue.extend_from_slice(&gf.u);
    scratch.re.clear();
    scratch.re.extend_from_slice(&gf.r);
    let ve = &scratch.ve;
    let ue = &scratch.ue;
    let re = &scratch.re;

    // pointwise fields on the extended range
    resize(&mut scratch.w, ne);
    resize(&mut scratch.p, ne);
    resize(&mut scratch.kappa, ne);
    for j in 0..ne {
        scratch.w[j] = re[j].powi(m) * ue[j];
        scratch.p[j] = powr(ve[j], -gamma);
        scratch.kappa[j] = powr(ve[j], -(beta + 5.0));
    }
    let w = &scratch.w;
    let p = &scratch.p;
    let kappa = &scratch.kappa;

    // first derivatives and the inner capillary flux on 1..ne-1
    resize(&mut scratch.vx, ne);
    resize(&mut scratch.wx, ne);
    resize(&mut scratch.g, ne);
    for j in 1..ne - 1 {
        let vx = (ve[j + 1] - ve[j - 1]) * inv2dx;
        scratch.vx[j] = vx;
        scratch.wx[j] = (w[j + 1] - w[j - 1]) * inv2dx;
        scratch.g[j] = re[j].powi(2 * m) * kappa[j] * vx;
    }
    let vx = &scratch.vx;
    let wx = &scratch.wx;
    let g = &scratch.g;

    // bracketed flux F on 2..ne-2
    resize(&mut scratch.f, ne);
    for j in GHOST..ne - GHOST {
        let gx = (g[j + 1] - g[j - 1]) * inv2dx;
        let stress = match params.kind {
            ModelKind::Kazhikhov => (2.0 * mu + lambda * powr(ve[j], -alpha)) * wx[j] / ve[j],
            ModelKind::DensityDependent => {
                (2.0 * mu + lambda) * powr(ve[j], -(alpha + 1.0)) * wx[j]
            }
        };
        let quad = 0.5 * (beta + 5.0) * re[j].powi(2 * m) * kappa[j] / ve[j] * vx[j] * vx[j];
        scratch.f[j] = stress - gx - quad;
    }
    let f = &scratch.f;

    // continuity equation (far-field node pinned)
    for i in 0..n - 1 {
        dv[i] = wx[i + GHOST];
    }
    dv[n - 1] = 0.0;

    // momentum equation at interior nodes; boundary values are re-imposed by
    // the integrator so both end nodes carry zero tendency
    du[0] = 0.0;
    du[n - 1] = 0.0;
    for i in 1..n - 1 {
        let j = i + GHOST;
        let px = (p[j + 1] - p[j - 1]) * inv2dx;
        let fx = (f[j + 1] - f[j - 1]) * inv2dx;
        let geo = if m == 0 {
            0.0
        } else {
            mf * re[j].powi(2 * m - 1) * kappa[j] * vx[j] * vx[j]
        };
        let src = match params.kind {
            ModelKind::DensityDependent if m != 0 => {
                2.0 * mf * mu * alpha * powr(ve[j], -(alpha + 1.0)) * re[j].powi(m - 1)
                    * ue[j]
                    * vx[j]
            }
            _ => 0.0,
        };
        du[i] = re[j].powi(m) * (fx - px) + src - geo;
    }
    Ok(())
}

fn resize(buf: &mut Vec<f64>, n: usize) {
    buf.clear();
    buf.resize(n, 0.0);
}
