//! Eulerian ↔ Lagrangian coordinate machinery.
//!
//! The mass coordinate of a radius r is h(r) = ∫ₐʳ zᵐ ρ₀(z) dz. Going the
//! other way, the radius field of a Lagrangian state integrates the
//! conserved form d(r^{m+1})/dx = (m+1) v, which keeps r(0) = a exact and
//! avoids the stiffness of the raw ODE r_x = v/rᵐ near the inner boundary.
//!
//! The inverse transform (a sampled Eulerian table back onto the uniform
//! mass grid) reconstructs cell mass increments with the rule conjugate to
//! the forward trapezoid, so a table produced by [`to_eulerian`] maps back
//! to its source state up to rounding, and resamples through a monotone
//! piecewise-cubic interpolant otherwise.

use crate::model::ModelParams;
use crate::num::quad_adaptive;
use crate::spatial::State;
use crate::{Error, Result};
use serde::Serialize;

/// Absolute tolerance for the adaptive quadrature in [`mass_coordinate`].
pub const QUAD_TOL: f64 = 1e-12;

/// Uniform grid on the truncated mass half-line [0, x_max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialGrid {
    n: usize,
    x_max: f64,
    dx: f64,
}

impl RadialGrid {
    pub fn new(n: usize, x_max: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain(format!("grid needs at least 3 nodes, got {n}")));
        }
        if !(x_max > 0.0) || !x_max.is_finite() {
            return Err(Error::domain(format!("x_max must be positive, got {x_max}")));
        }
        Ok(RadialGrid {
            n,
            x_max,
            dx: x_max / (n - 1) as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }
}

/// Cumulative mass h(r) = ∫ₐʳ zᵐ ρ₀(z) dz of an Eulerian density profile,
/// by adaptive quadrature to [`QUAD_TOL`].
pub fn mass_coordinate(
    r: f64,
    rho0: impl Fn(f64) -> f64,
    params: &ModelParams,
) -> Result<f64> {
    if !r.is_finite() || r < params.a {
        return Err(Error::domain(format!(
            "radius {r} below inner boundary a = {}",
            params.a
        )));
    }
    let m = params.m() as i32;
    Ok(quad_adaptive(|z| z.powi(m) * rho0(z), params.a, r, QUAD_TOL))
}

/// Radius field of a specific-volume field: r_i = (a^{m+1} + (m+1)·∫₀^{x_i} v)^{1/(m+1)}
/// with composite-trapezoid cumulative integration. Strictly increasing for
/// positive v; r_0 = a exactly.
pub fn radius_from_state(v: &[f64], grid: &RadialGrid, params: &ModelParams) -> Result<Vec<f64>> {
    if v.len() != grid.n() {
        return Err(Error::domain(format!(
            "field length {} does not match grid ({})",
            v.len(),
            grid.n()
        )));
    }
    for (i, &vi) in v.iter().enumerate() {
        if !(vi > 0.0) || !vi.is_finite() {
            return Err(Error::domain(format!(
                "specific volume must be positive, v[{i}] = {vi}"
            )));
        }
    }
    let mp1 = params.m_f64() + 1.0;
    let inv = 1.0 / mp1;
    let a_pow = params.a.powi(params.m() as i32 + 1);
    let mut out = Vec::with_capacity(v.len());
    let mut cum = 0.0;
    out.push(params.a);
    for i in 1..v.len() {
        cum += 0.5 * grid.dx() * (v[i - 1] + v[i]);
        out.push((a_pow + mp1 * cum).powf(inv));
    }
    Ok(out)
}

/// Sampled Eulerian profile along the radius: (r, ρ, û) rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerianTable {
    pub r: Vec<f64>,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
}

/// Sample a Lagrangian state as an Eulerian (r, ρ, û) table. The radius
/// column is recomputed from v so table and state are exactly compatible.
pub fn to_eulerian(state: &State, grid: &RadialGrid, params: &ModelParams) -> Result<EulerianTable> {
    let r = radius_from_state(&state.v, grid, params)?;
    let rho = state.v.iter().map(|&v| 1.0 / v).collect();
    Ok(EulerianTable {
        r,
        rho,
        u: state.u.clone(),
    })
}

/// Rebuild a Lagrangian state on `grid` from an Eulerian table.
///
/// The table must start at the inner boundary, have strictly increasing
/// radii and positive densities, and carry at least as much mass as the
/// grid covers. Violations are errors, not repairs.
pub fn from_eulerian(
    table: &EulerianTable,
    grid: &RadialGrid,
    params: &ModelParams,
) -> Result<State> {
    let k = table.r.len();
    if k < 3 || table.rho.len() != k || table.u.len() != k {
        return Err(Error::domain(
            "table needs >= 3 rows with matching column lengths".to_string(),
        ));
    }
    let tol_a = 1e-9 * params.a.max(1.0);
    if (table.r[0] - params.a).abs() > tol_a {
        return Err(Error::domain(format!(
            "table must start at the inner boundary (r[0] = {}, a = {})",
            table.r[0], params.a
        )));
    }
    for w in table.r.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::domain(
                "radius table must be strictly increasing".to_string(),
            ));
        }
    }
    for (i, &rho) in table.rho.iter().enumerate() {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::domain(format!("density must be positive, rho[{i}] = {rho}")));
        }
    }

    // Mass knots via the rule conjugate to the forward trapezoid:
    // Δx_j = (r_{j+1}^{m+1} − r_j^{m+1}) · 2 / ((m+1)(v_j + v_{j+1})).
    let mp1 = params.m_f64() + 1.0;
    let v_tab: Vec<f64> = table.rho.iter().map(|&rho| 1.0 / rho).collect();
    let mut x = Vec::with_capacity(k);
    x.push(0.0);
    for j in 0..k - 1 {
        let dr_pow = table.r[j + 1].powf(mp1) - table.r[j].powf(mp1);
        let dxj = dr_pow * 2.0 / (mp1 * (v_tab[j] + v_tab[j + 1]));
        x.push(x[j] + dxj);
    }
    let coverage_tol = 1e-9 * grid.x_max().max(1.0);
    if x[k - 1] < grid.x_max() - coverage_tol {
        return Err(Error::domain(format!(
            "table covers mass up to {} but the grid needs {}",
            x[k - 1],
            grid.x_max()
        )));
    }

    let v_interp = Pchip::new(&x, &v_tab)?;
    let u_interp = Pchip::new(&x, &table.u)?;
    let x_last = x[k - 1];
    let v: Vec<f64> = (0..grid.n())
        .map(|i| v_interp.eval(grid.node(i).min(x_last)))
        .collect();
    let u: Vec<f64> = (0..grid.n())
        .map(|i| u_interp.eval(grid.node(i).min(x_last)))
        .collect();
    let r = radius_from_state(&v, grid, params)?;
    Ok(State { t: 0.0, v, u, r })
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson limiting).
/// Exact at the knots; C¹ in between.
pub(crate) struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub(crate) fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n < 3 || y.len() != n {
            return Err(Error::domain("interpolant needs >= 3 matching knots".to_string()));
        }
        for w in x.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::domain("interpolation knots must be strictly increasing".to_string()));
            }
        }
        let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                d[i] = 0.0;
            } else {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        d[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        Ok(Pchip {
            x: x.to_vec(),
            y: y.to_vec(),
            d,
        })
    }

    pub(crate) fn eval(&self, xq: f64) -> f64 {
        let n = self.x.len();
        let xq = xq.clamp(self.x[0], self.x[n - 1]);
        // binary search for the containing interval
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.x[mid] <= xq {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = self.x[lo + 1] - self.x[lo];
        let t = (xq - self.x[lo]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[lo] + h10 * h * self.d[lo] + h01 * self.y[lo + 1] + h11 * h * self.d[lo + 1]
    }
}

/// Three-point one-sided slope estimate with the standard monotonicity clip.
fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}
