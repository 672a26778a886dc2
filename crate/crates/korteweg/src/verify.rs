//! Verification oracles for the spatial operator and the full space-time
//! scheme: manufactured solutions with numerically differentiated forcing,
//! convergence-order ladders, and an independently coded brute-force
//! discretization used as a cross-oracle.
//!
//! The forcing of a manufactured case is obtained by applying the continuous
//! operator to the closed-form fields through sixth-order central numerical
//! differentiation at a fine substep, never by hand-expanded algebra: the
//! momentum right-hand side has over a dozen terms and a hand derivation is
//! the dominant error risk, while the differentiation error sits far below
//! every discretization error measured here.
//!
//! Review checklist for oracle independence: `brute_force_rhs` and its
//! helpers in this module keep their own ghost construction and their own
//! stencil code; they must not call into `spatial::ghost_fill` or reuse
//! `spatial`'s derivative loops. The two implementations share only the
//! pointwise coefficient laws, which have a single source of truth in
//! `model`.

use crate::geometry::RadialGrid;
use crate::integrate::{run_forced, RunConfig, Termination};
use crate::model::{ModelKind, ModelParams};
use crate::num::{ls_slope, powr};
use crate::spatial::{rhs, State};
use crate::{Error, Result};
use serde::Serialize;
use std::cell::RefCell;

/// Sixth-order central first derivative.
fn d6(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x - 3.0 * h) + 9.0 * f(x - 2.0 * h) - 45.0 * f(x - h) + 45.0 * f(x + h)
        - 9.0 * f(x + 2.0 * h)
        + f(x + 3.0 * h))
        / (60.0 * h)
}

/// Closed-form space-time fields used to manufacture a forced solution.
///
/// Both fields are Gaussian bumps with separable cosine time factors,
/// pinned to the far-field state (1, 0) outside the bump supports: the
/// centers sit at least six widths away from both domain ends, so the
/// boundary values of the exact pair agree with the solver's closures to
/// machine precision.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ManufacturedCase {
    pub x_max: f64,
    pub v_amp: f64,
    pub v_center: f64,
    pub v_width: f64,
    pub v_freq: f64,
    pub u_amp: f64,
    pub u_center: f64,
    pub u_width: f64,
    pub u_freq: f64,
}

impl ManufacturedCase {
    /// Default smooth-bump case.
    pub fn bump() -> Self {
        ManufacturedCase {
            x_max: 10.0,
            v_amp: 0.12,
            v_center: 4.5,
            v_width: 0.75,
            v_freq: 1.3,
            u_amp: 0.1,
            u_center: 5.2,
            u_width: 0.8,
            u_freq: 0.9,
        }
    }

    /// The trivial case (1, 0) with zero forcing.
    pub fn equilibrium() -> Self {
        ManufacturedCase {
            v_amp: 0.0,
            u_amp: 0.0,
            ..ManufacturedCase::bump()
        }
    }

    pub fn v_exact(&self, t: f64, x: f64) -> f64 {
        let xi = (x - self.v_center) / self.v_width;
        1.0 + self.v_amp * (self.v_freq * t).cos() * (-xi * xi).exp()
    }

    pub fn u_exact(&self, t: f64, x: f64) -> f64 {
        let xi = (x - self.u_center) / self.u_width;
        self.u_amp * (self.u_freq * t).cos() * (-xi * xi).exp()
    }

    pub fn v_time_derivative(&self, t: f64, x: f64) -> f64 {
        let xi = (x - self.v_center) / self.v_width;
        -self.v_amp * self.v_freq * (self.v_freq * t).sin() * (-xi * xi).exp()
    }

    pub fn u_time_derivative(&self, t: f64, x: f64) -> f64 {
        let xi = (x - self.u_center) / self.u_width;
        -self.u_amp * self.u_freq * (self.u_freq * t).sin() * (-xi * xi).exp()
    }

    /// ∫₀ˣ v(t, y) dy in closed form through the error function.
    pub fn v_cumulative(&self, t: f64, x: f64) -> f64 {
        let w = self.v_width;
        let c = self.v_center;
        let half = 0.5 * w * std::f64::consts::PI.sqrt();
        x + self.v_amp
            * (self.v_freq * t).cos()
            * half
            * (libm::erf((x - c) / w) + libm::erf(c / w))
    }

    /// Exact radius r(t, x) = (a^{m+1} + (m+1) ∫₀ˣ v dy)^{1/(m+1)}.
    pub fn radius_exact(&self, t: f64, x: f64, params: &ModelParams) -> f64 {
        let mp1 = params.m_f64() + 1.0;
        (params.a.powf(mp1) + mp1 * self.v_cumulative(t, x)).powf(1.0 / mp1)
    }

    /// Check the compatibility contract: u(t, 0) = 0, v_x(t, 0) = 0 and the
    /// pair equal to (1, 0) at the far end, all to machine precision.
    pub fn validate_compatibility(&self) -> Result<()> {
        let tol = 1e-12;
        let vx0 = d6(&|y| self.v_exact(0.0, y), 0.0, 1e-3);
        if self.u_exact(0.0, 0.0).abs() > tol
            || vx0.abs() > tol
            || (self.v_exact(0.0, self.x_max) - 1.0).abs() > tol
            || self.u_exact(0.0, self.x_max).abs() > tol
        {
            return Err(Error::domain(
                "manufactured fields are not compatible with the boundary closures".to_string(),
            ));
        }
        Ok(())
    }

    fn diff_step(&self) -> f64 {
        self.v_width.min(self.u_width) / 64.0
    }
}

/// Continuous right-hand side of the chosen family applied to the exact
/// fields at (t, x), evaluated by nested sixth-order differentiation.
pub fn continuous_rhs(
    case: &ManufacturedCase,
    params: &ModelParams,
    t: f64,
    x: f64,
) -> (f64, f64) {
    continuous_rhs_with_step(case, params, t, x, case.diff_step())
}

/// Same as [`continuous_rhs`] with an explicit differentiation step; the
/// self-consistency test varies the step to bound the construction error.
pub fn continuous_rhs_with_step(
    case: &ManufacturedCase,
    params: &ModelParams,
    t: f64,
    x: f64,
    h: f64,
) -> (f64, f64) {
    let m = params.m() as i32;
    let mf = params.m_f64();
    let beta = params.beta;
    let alpha = params.alpha;
    let mu = params.mu_tilde;
    let lambda = params.lambda_tilde;

    let v = move |y: f64| case.v_exact(t, y);
    let u = move |y: f64| case.u_exact(t, y);
    let r = move |y: f64| case.radius_exact(t, y, params);
    let w = move |y: f64| r(y).powi(m) * u(y);
    let p = move |y: f64| powr(v(y), -params.gamma);
    let vx = move |y: f64| d6(&v, y, h);
    let g = move |y: f64| r(y).powi(2 * m) * powr(v(y), -(beta + 5.0)) * vx(y);
    let stress = move |y: f64| {
        let wx = d6(&w, y, h);
        match params.kind {
            ModelKind::Kazhikhov => (2.0 * mu + lambda * powr(v(y), -alpha)) * wx / v(y),
            ModelKind::DensityDependent => (2.0 * mu + lambda) * powr(v(y), -(alpha + 1.0)) * wx,
        }
    };
    let flux = move |y: f64| {
        let quad = 0.5 * (beta + 5.0) * r(y).powi(2 * m) * powr(v(y), -(beta + 6.0)) * vx(y) * vx(y);
        stress(y) - d6(&g, y, h) - quad
    };

    let rhs_v = d6(&w, x, h);
    let vx_x = vx(x);
    let geo = if m == 0 {
        0.0
    } else {
        mf * r(x).powi(2 * m - 1) * powr(v(x), -(beta + 5.0)) * vx_x * vx_x
    };
    let src = match params.kind {
        ModelKind::DensityDependent if m != 0 => {
            2.0 * mf * mu * alpha * powr(v(x), -(alpha + 1.0)) * r(x).powi(m - 1) * u(x) * vx_x
        }
        _ => 0.0,
    };
    let rhs_u = r(x).powi(m) * (d6(&flux, x, h) - d6(&p, x, h)) + src - geo;
    (rhs_v, rhs_u)
}

/// Forcing fields S = ∂_t(exact) − RHS(exact) sampled on the grid at time t.
pub fn source_fields(
    case: &ManufacturedCase,
    params: &ModelParams,
    t: f64,
    grid: &RadialGrid,
) -> (Vec<f64>, Vec<f64>) {
    let n = grid.n();
    let mut sv = vec![0.0; n];
    let mut su = vec![0.0; n];
    for i in 0..n {
        let x = grid.node(i);
        let (rv, ru) = continuous_rhs(case, params, t, x);
        sv[i] = case.v_time_derivative(t, x) - rv;
        su[i] = case.u_time_derivative(t, x) - ru;
    }
    (sv, su)
}

/// Sample the exact pair on a grid as a solver state.
pub fn exact_state(
    case: &ManufacturedCase,
    params: &ModelParams,
    t: f64,
    grid: &RadialGrid,
) -> Result<State> {
    let v: Vec<f64> = (0..grid.n()).map(|i| case.v_exact(t, grid.node(i))).collect();
    let u: Vec<f64> = (0..grid.n()).map(|i| case.u_exact(t, grid.node(i))).collect();
    let mut s = State::new(v, u, grid, params)?;
    s.t = t;
    Ok(s)
}

/// One resolution level of a spatial-consistency measurement.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MmsLevel {
    pub n: usize,
    pub dx: f64,
    pub residual_v: f64,
    pub residual_u: f64,
}

impl MmsLevel {
    pub fn residual(&self) -> f64 {
        self.residual_v.max(self.residual_u)
    }
}

/// Result of [`mms_spatial_order`].
#[derive(Debug, Clone, Serialize)]
pub struct MmsSpatialReport {
    pub levels: Vec<MmsLevel>,
    /// Least-squares slope of log residual against log dx; meaningless when
    /// [`Self::is_exact`].
    pub order: f64,
}

impl MmsSpatialReport {
    /// All residuals at machine level (the zero-forcing equilibrium case).
    pub fn is_exact(&self) -> bool {
        self.levels.iter().all(|l| l.residual() <= 1e-13)
    }
}

/// Measure the consistency order of the spatial operator at t = 0:
/// ‖rhs(exact) + S − ∂ₜ(exact)‖_∞ per level, fitted in log-log.
pub fn mms_spatial_order(
    case: &ManufacturedCase,
    params: &ModelParams,
    n_list: &[usize],
) -> Result<MmsSpatialReport> {
    if n_list.len() < 3 {
        return Err(Error::domain("need at least 3 resolutions".to_string()));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("resolutions must be strictly increasing".to_string()));
    }
    case.validate_compatibility()?;
    let mut levels = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let grid = RadialGrid::new(n, case.x_max)?;
        let state = exact_state(case, params, 0.0, &grid)?;
        let (dv, du) = rhs(&state, &grid, params)?;
        let (sv, su) = source_fields(case, params, 0.0, &grid);
        let mut res_v = 0.0f64;
        let mut res_u = 0.0f64;
        for i in 0..n {
            let x = grid.node(i);
            res_v = res_v.max((dv[i] + sv[i] - case.v_time_derivative(0.0, x)).abs());
            res_u = res_u.max((du[i] + su[i] - case.u_time_derivative(0.0, x)).abs());
        }
        levels.push(MmsLevel {
            n,
            dx: grid.dx(),
            residual_v: res_v,
            residual_u: res_u,
        });
    }
    let xs: Vec<f64> = levels.iter().map(|l| l.dx.ln()).collect();
    let ys: Vec<f64> = levels.iter().map(|l| l.residual().max(1e-300).ln()).collect();
    Ok(MmsSpatialReport {
        order: ls_slope(&xs, &ys),
        levels,
    })
}

/// One level of a forced space-time convergence ladder.
#[derive(Debug, Clone, Serialize)]
pub struct MmsFullLevel {
    pub n: usize,
    pub dt: f64,
    pub dx: f64,
    pub error: f64,
}

/// Outcome of [`mms_full_order`].
#[derive(Debug, Clone, Serialize)]
pub enum FullOrderVerdict {
    /// Errors at machine level everywhere (zero-forcing equilibrium).
    Exact,
    /// Fitted order in dx.
    Order(f64),
    /// A level terminated with a fault; no order available.
    Fault { level_n: usize, reason: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct MmsFullReport {
    pub t_end: f64,
    pub levels: Vec<MmsFullLevel>,
    pub verdict: FullOrderVerdict,
}

/// Run the forced scheme to `t_end` on each (n, dt) level and fit the final
/// error against dx. Callers scale dt ∝ dx² so the spatial error dominates.
pub fn mms_full_order(
    case: &ManufacturedCase,
    params: &ModelParams,
    ladder: &[(usize, f64)],
    t_end: f64,
) -> Result<MmsFullReport> {
    if ladder.len() < 2 {
        return Err(Error::domain("need at least 2 ladder levels".to_string()));
    }
    case.validate_compatibility()?;
    let mut levels = Vec::with_capacity(ladder.len());
    for &(n, dt) in ladder {
        let grid = RadialGrid::new(n, case.x_max)?;
        let initial = exact_state(case, params, 0.0, &grid)?;
        let config = RunConfig {
            t_end,
            dt_fixed: Some(dt),
            dt_min: f64::MIN_POSITIVE,
            dt_init: dt,
            snapshot_every: usize::MAX >> 1,
            ..RunConfig::default()
        };
        let cache = SourceCache::new(*case, *params, grid);
        let forcing = |t: f64| cache.at(t);
        let mut sink = CaptureSink(None);
        let summary = run_forced(initial, &grid, params, &config, &mut sink, &forcing)?;
        if summary.termination != Termination::Completed {
            return Ok(MmsFullReport {
                t_end,
                levels,
                verdict: FullOrderVerdict::Fault {
                    level_n: n,
                    reason: summary
                        .fault_message
                        .unwrap_or_else(|| summary.termination.label().to_string()),
                },
            });
        }
        let last = sink.0.expect("completed run leaves a final snapshot");
        let mut err = 0.0f64;
        for i in 0..n {
            let x = grid.node(i);
            err = err.max((last.v[i] - case.v_exact(last.t, x)).abs());
            err = err.max((last.u[i] - case.u_exact(last.t, x)).abs());
        }
        levels.push(MmsFullLevel {
            n,
            dt,
            dx: grid.dx(),
            error: err,
        });
    }
    let verdict = if levels.iter().all(|l| l.error <= 1e-12) {
        FullOrderVerdict::Exact
    } else {
        let xs: Vec<f64> = levels.iter().map(|l| l.dx.ln()).collect();
        let ys: Vec<f64> = levels.iter().map(|l| l.error.max(1e-300).ln()).collect();
        FullOrderVerdict::Order(ls_slope(&xs, &ys))
    };
    Ok(MmsFullReport {
        t_end,
        levels,
        verdict,
    })
}

struct CaptureSink(Option<State>);

impl crate::integrate::DiagnosticsSink for CaptureSink {
    fn on_snapshot(&mut self, _step: usize, _t: f64, state: &State) {
        self.0 = Some(state.clone());
    }
}

type SourcePair = (Vec<f64>, Vec<f64>);

/// Memoizes the two or three stage times each step asks for.
struct SourceCache {
    case: ManufacturedCase,
    params: ModelParams,
    grid: RadialGrid,
    map: RefCell<Vec<(u64, SourcePair)>>,
}

impl SourceCache {
    fn new(case: ManufacturedCase, params: ModelParams, grid: RadialGrid) -> Self {
        SourceCache {
            case,
            params,
            grid,
            map: RefCell::new(Vec::new()),
        }
    }

    fn at(&self, t: f64) -> SourcePair {
        let key = t.to_bits();
        let mut map = self.map.borrow_mut();
        if let Some((_, cached)) = map.iter().find(|(k, _)| *k == key) {
            return cached.clone();
        }
        let fields = source_fields(&self.case, &self.params, t, &self.grid);
        if map.len() >= 4 {
            map.remove(0);
        }
        map.push((key, fields.clone()));
        fields
    }
}

/// Independent, expanded (non-flux-form) discretization of the same
/// equations, coded separately from `spatial::rhs` and used only as a
/// cross-oracle. Every geometric factor is expanded through the product
/// rule with r_x = v/rᵐ instead of living inside a differenced flux, so the
/// two implementations differ at O(dx²) for m ≥ 1 and coincide exactly in
/// the planar reduction m = 0, where no geometric factors remain.
pub fn brute_force_rhs(
    state: &State,
    grid: &RadialGrid,
    params: &ModelParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = grid.n();
    if n < 5 {
        return Err(Error::domain("brute-force oracle needs n >= 5".to_string()));
    }
    for (i, &vi) in state.v.iter().enumerate() {
        if !(vi > 0.0) || !vi.is_finite() {
            return Err(Error::domain(format!("v[{i}] = {vi} is not admissible")));
        }
    }
    let pad = 2usize;
    let ne = n + 2 * pad;
    let m = params.m() as i32;
    let mf = params.m_f64();
    let dx = grid.dx();
    let beta = params.beta;
    let alpha = params.alpha;
    let mu = params.mu_tilde;
    let lambda = params.lambda_tilde;

    // own ghost construction (same boundary contract, separate code)
    let mut ve = vec![1.0; ne];
    let mut ue = vec![0.0; ne];
    let mut re = vec![0.0; ne];
    for i in 0..n {
        ve[pad + i] = state.v[i];
        ue[pad + i] = state.u[i];
        re[pad + i] = state.r[i];
    }
    for k in 1..=pad {
        ve[pad - k] = state.v[k];
        ue[pad - k] = -state.u[k];
        re[pad - k] = state.r[k];
    }
    let mp1 = mf + 1.0;
    for k in 1..=pad {
        ve[pad + n - 1 + k] = 1.0;
        ue[pad + n - 1 + k] = 0.0;
        re[pad + n - 1 + k] = (state.r[n - 1].powf(mp1) + k as f64 * mp1 * dx).powf(1.0 / mp1);
    }

    // own centered-difference helper
    let d1 = |f: &[f64], j: usize| (f[j + 1] - f[j - 1]) / (2.0 * dx);

    // expanded derivative of rᵐu: rᵐ u_x + m u v / r
    let mut wx = vec![0.0; ne];
    for j in 1..ne - 1 {
        let ux = d1(&ue, j);
        wx[j] = re[j].powi(m) * ux
            + if m == 0 {
                0.0
            } else {
                mf * ue[j] * ve[j] / re[j]
            };
    }
    // inner capillary slope field g = v^{−(β+5)} v_x and its expanded flux
    // derivative Ḡx = 2m r^{m−1} v g + r²ᵐ g_x
    let mut gfield = vec![0.0; ne];
    for j in 1..ne - 1 {
        gfield[j] = powr(ve[j], -(beta + 5.0)) * d1(&ve, j);
    }
    let mut pfield = vec![0.0; ne];
    for j in 0..ne {
        pfield[j] = powr(ve[j], -params.gamma);
    }
    let mut fbar = vec![0.0; ne];
    for j in 2..ne - 2 {
        let gx = if m == 0 {
            d1(&gfield, j)
        } else {
            2.0 * mf * re[j].powi(m - 1) * ve[j] * gfield[j] + re[j].powi(2 * m) * d1(&gfield, j)
        };
        let stress = match params.kind {
            ModelKind::Kazhikhov => (2.0 * mu + lambda * powr(ve[j], -alpha)) * wx[j] / ve[j],
            ModelKind::DensityDependent => (2.0 * mu + lambda) * powr(ve[j], -(alpha + 1.0)) * wx[j],
        };
        let vxj = d1(&ve, j);
        let quad = 0.5 * (beta + 5.0) * re[j].powi(2 * m) * powr(ve[j], -(beta + 5.0)) / ve[j]
            * vxj
            * vxj;
        fbar[j] = stress - gx - quad;
    }

    let mut dv = vec![0.0; n];
    let mut du = vec![0.0; n];
    for i in 0..n - 1 {
        dv[i] = wx[i + pad];
    }
    for i in 1..n - 1 {
        let j = i + pad;
        let vxj = d1(&ve, j);
        let geo = if m == 0 {
            0.0
        } else {
            mf * re[j].powi(2 * m - 1) * powr(ve[j], -(beta + 5.0)) * vxj * vxj
        };
        let src = match params.kind {
            ModelKind::DensityDependent if m != 0 => {
                2.0 * mf * mu * alpha * powr(ve[j], -(alpha + 1.0)) * re[j].powi(m - 1)
                    * ue[j]
                    * vxj
            }
            _ => 0.0,
        };
        du[i] = re[j].powi(m) * (d1(&fbar, j) - d1(&pfield, j)) + src - geo;
    }
    Ok((dv, du))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(kind: ModelKind, dim: u32) -> ModelParams {
        ModelParams {
            kind,
            alpha: 1.0,
            beta: -2.5,
            gamma: 1.4,
            mu_tilde: 1.0,
            lambda_tilde: 0.5,
            dim,
            a: 1.0,
        }
    }

    #[test]
    fn source_construction_is_self_consistent() {
        // shrinking the differentiation step barely moves the source
        let case = ManufacturedCase::bump();
        let p = params(ModelKind::Kazhikhov, 3);
        let t = 0.3;
        let h = case.diff_step();
        for &x in &[3.9, 4.5, 5.1, 5.8] {
            let (rv1, ru1) = continuous_rhs(&case, &p, t, x);
            let (rv2, ru2) = continuous_rhs_with_step(&case, &p, t, x, h / 1.5);
            assert!((rv1 - rv2).abs() < 1e-8, "rhs_v {rv1} vs {rv2}");
            assert!((ru1 - ru2).abs() < 1e-6, "rhs_u {ru1} vs {ru2}");
        }
    }

    #[test]
    fn equilibrium_case_has_zero_residual() {
        let case = ManufacturedCase::equilibrium();
        let p = params(ModelKind::Kazhikhov, 3);
        let report = mms_spatial_order(&case, &p, &[32, 48, 64]).unwrap();
        assert!(report.is_exact(), "{:?}", report.levels);
    }

    #[test]
    fn spatial_order_is_second_order() {
        let case = ManufacturedCase::bump();
        for kind in [ModelKind::Kazhikhov, ModelKind::DensityDependent] {
            let p = params(kind, 2);
            let report = mms_spatial_order(&case, &p, &[96, 144, 216]).unwrap();
            assert!(
                report.order > 1.6 && report.order < 2.4,
                "{kind:?}: order {} ({:?})",
                report.order,
                report.levels
            );
        }
    }

    #[test]
    fn rejects_degenerate_resolution_lists() {
        let case = ManufacturedCase::bump();
        let p = params(ModelKind::Kazhikhov, 3);
        assert!(mms_spatial_order(&case, &p, &[32, 64]).is_err());
        assert!(mms_spatial_order(&case, &p, &[64, 64, 96]).is_err());
    }

    #[test]
    fn full_order_equilibrium_is_exact() {
        let case = ManufacturedCase::equilibrium();
        let p = params(ModelKind::Kazhikhov, 2);
        let report = mms_full_order(&case, &p, &[(32, 1e-4), (48, 0.444e-4)], 0.002).unwrap();
        assert!(matches!(report.verdict, FullOrderVerdict::Exact), "{:?}", report.verdict);
    }

    #[test]
    fn full_order_ladder_converges() {
        let case = ManufacturedCase::bump();
        let p = params(ModelKind::Kazhikhov, 2);
        let dt0 = 2.0e-4;
        let ladder: Vec<(usize, f64)> = [64usize, 96, 144]
            .iter()
            .map(|&n| {
                let scale = (63.0 / (n as f64 - 1.0)).powi(2);
                (n, dt0 * scale)
            })
            .collect();
        let report = mms_full_order(&case, &p, &ladder, 0.02).unwrap();
        match report.verdict {
            FullOrderVerdict::Order(q) => {
                assert!(q > 1.5, "order {q}, levels {:?}", report.levels)
            }
            other => panic!("expected an order, got {other:?}"),
        }
    }

    #[test]
    fn brute_force_matches_at_equilibrium_and_planar() {
        let grid = RadialGrid::new(96, 8.0).unwrap();
        // equilibrium: both exactly zero
        let p3 = params(ModelKind::Kazhikhov, 3);
        let eq = State::equilibrium(&grid, &p3).unwrap();
        let (dv_a, du_a) = rhs(&eq, &grid, &p3).unwrap();
        let (dv_b, du_b) = brute_force_rhs(&eq, &grid, &p3).unwrap();
        for i in 0..grid.n() {
            assert_eq!(dv_a[i], dv_b[i]);
            assert_eq!(du_a[i], du_b[i]);
        }

        // planar reduction: identical stencils, agreement to rounding
        for kind in [ModelKind::Kazhikhov, ModelKind::DensityDependent] {
            let p = params(kind, 1);
            let v: Vec<f64> = (0..grid.n())
                .map(|i| 1.0 + 0.2 * (-((grid.node(i) - 4.0) / 1.0f64).powi(2)).exp())
                .collect();
            let u: Vec<f64> = (0..grid.n())
                .map(|i| 0.15 * (-((grid.node(i) - 3.4) / 0.8f64).powi(2)).exp())
                .collect();
            let s = State::new(v, u, &grid, &p).unwrap();
            let (dv_a, du_a) = rhs(&s, &grid, &p).unwrap();
            let (dv_b, du_b) = brute_force_rhs(&s, &grid, &p).unwrap();
            for i in 0..grid.n() {
                assert!((dv_a[i] - dv_b[i]).abs() <= 1e-12, "dv at {i}");
                assert!(
                    (du_a[i] - du_b[i]).abs() <= 1e-12 * (1.0 + du_a[i].abs()),
                    "du at {i}: {} vs {}",
                    du_a[i],
                    du_b[i]
                );
            }
        }
    }

    #[test]
    fn brute_force_agrees_at_second_order_for_spherical_flows() {
        let case = ManufacturedCase::bump();
        let p = params(ModelKind::Kazhikhov, 3);
        let diff_at = |n: usize| {
            let grid = RadialGrid::new(n, case.x_max).unwrap();
            let s = exact_state(&case, &p, 0.0, &grid).unwrap();
            let (dv_a, du_a) = rhs(&s, &grid, &p).unwrap();
            let (dv_b, du_b) = brute_force_rhs(&s, &grid, &p).unwrap();
            let mut d = 0.0f64;
            for i in 0..n {
                d = d.max((dv_a[i] - dv_b[i]).abs()).max((du_a[i] - du_b[i]).abs());
            }
            d
        };
        let d1 = diff_at(128);
        let d2 = diff_at(256);
        let rate = (d1 / d2).log2();
        assert!(rate > 1.6, "rate {rate} (d1 = {d1}, d2 = {d2})");
    }
}
