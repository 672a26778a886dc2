//! File outputs: diagnostics time series, state snapshots, Eulerian tables,
//! region rasters (CSV) and the run summary (JSON).
//!
//! All floating-point CSV fields are written with 17 significant digits so
//! values round-trip bit-exactly and downstream diffs are stable.

use crate::diagnostics::{EnergyLedger, TimeSeriesRow};
use crate::geometry::{EulerianTable, RadialGrid};
use crate::integrate::{RunConfig, RunSummary};
use crate::model::{ModelKind, ModelParams};
use crate::regime::{CaseLabel, RegimeVerdict};
use crate::spatial::State;
use crate::Result;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// Round-trippable decimal formatting (17 significant digits).
pub fn fmt_g(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_g).unwrap_or_default()
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}

pub const TIMESERIES_HEADER: &str = "step,t,E,D_cum,boundary_leak,defect,v_min,v_max,\
kanel_lower,kanel_upper,norm_v_minus_1_H1,norm_u_H1,norm_vx_1r,\
acc_slope_visc,acc_slope_pressure,acc_curvature,acc_flux_divergence,\
strain_norm,third_slope_sq";

/// Diagnostics time series, one row per snapshot.
pub fn write_timeseries_csv(path: &Path, rows: &[TimeSeriesRow]) -> Result<()> {
    let mut out = String::with_capacity(rows.len() * 256 + 256);
    out.push_str(TIMESERIES_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.step,
            fmt_g(r.t),
            fmt_g(r.e),
            fmt_g(r.d_cum),
            fmt_g(r.boundary_leak),
            fmt_g(r.defect),
            fmt_g(r.v_min),
            fmt_g(r.v_max),
            fmt_opt(r.kanel_lower),
            fmt_opt(r.kanel_upper),
            fmt_g(r.norm_v_minus_1_h1),
            fmt_g(r.norm_u_h1),
            fmt_g(r.norm_vx_1r),
            fmt_g(r.acc_slope_visc),
            fmt_g(r.acc_slope_pressure),
            fmt_g(r.acc_curvature),
            fmt_g(r.acc_flux_divergence),
            fmt_g(r.strain_norm),
            fmt_g(r.third_slope_sq),
        ));
    }
    write_file(path, &out)
}

/// State snapshot with columns x, v, u, r; loadable through
/// `[initial] file = ...`.
pub fn write_state_csv(path: &Path, state: &State, grid: &RadialGrid) -> Result<()> {
    let mut out = String::with_capacity(grid.n() * 80 + 16);
    out.push_str("x,v,u,r\n");
    for i in 0..grid.n() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_g(grid.node(i)),
            fmt_g(state.v[i]),
            fmt_g(state.u[i]),
            fmt_g(state.r[i]),
        ));
    }
    write_file(path, &out)
}

/// Eulerian profile table with columns r, rho, u_radial.
pub fn write_eulerian_csv(path: &Path, table: &EulerianTable) -> Result<()> {
    let mut out = String::with_capacity(table.r.len() * 60 + 16);
    out.push_str("r,rho,u_radial\n");
    for i in 0..table.r.len() {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_g(table.r[i]),
            fmt_g(table.rho[i]),
            fmt_g(table.u[i]),
        ));
    }
    write_file(path, &out)
}

/// Raster of classifier verdicts: one row per (α, β) sample with the matched
/// case labels and the binding slack of every case.
pub fn write_raster_csv(path: &Path, verdicts: &[RegimeVerdict], kind: ModelKind) -> Result<()> {
    let cases = CaseLabel::all(kind);
    let mut out = String::new();
    out.push_str("alpha,beta,gamma,theorem,matched_cases");
    for c in cases {
        out.push_str(&format!(",slack_min_{c}"));
    }
    out.push('\n');
    for v in verdicts {
        let matched: Vec<&str> = v
            .matched_cases()
            .iter()
            .map(|c| c.as_str())
            .collect();
        out.push_str(&format!(
            "{},{},{},{},{}",
            fmt_g(v.alpha),
            fmt_g(v.beta),
            fmt_g(v.gamma),
            kind.label(),
            matched.join(";"),
        ));
        for c in cases {
            let slack = v.case(*c).map(|cv| cv.slack_min()).unwrap_or(f64::NAN);
            out.push(',');
            out.push_str(&fmt_g(slack));
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// Header-only raster (empty parameter ranges).
pub fn write_empty_raster_csv(path: &Path, kind: ModelKind) -> Result<()> {
    write_raster_csv(path, &[], kind)
}

/// Regime facts embedded in the run report.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub family: String,
    pub matched_cases: Vec<String>,
    pub matched: bool,
}

impl RegimeReport {
    pub fn from_verdict(v: &RegimeVerdict) -> Self {
        RegimeReport {
            family: v.kind.label().to_string(),
            matched_cases: v
                .matched_cases()
                .iter()
                .map(|c| c.as_str().to_string())
                .collect(),
            matched: v.is_matched(),
        }
    }
}

/// Final norms block of the run report.
#[derive(Debug, Clone, Serialize)]
pub struct FinalNorms {
    pub v_minus_1_h1: f64,
    pub u_h1: f64,
    pub vx_1r: f64,
}

/// Envelope of the Kanel bracket across snapshots.
#[derive(Debug, Clone, Serialize)]
pub struct BracketEnvelope {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

/// End-of-run JSON report: termination, global volume range, the final
/// energy ledger, bracket envelope and norms.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub params: ModelParams,
    pub grid: RadialGrid,
    pub run: RunConfig,
    pub termination: String,
    pub exit_code: i32,
    pub steps: usize,
    pub final_time: f64,
    pub v_min_global: f64,
    pub v_max_global: f64,
    pub fault_message: Option<String>,
    pub regime: RegimeReport,
    pub ledger: Option<EnergyLedger>,
    pub kanel_bracket: BracketEnvelope,
    pub final_norms: Option<FinalNorms>,
}

impl RunReport {
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        params: &ModelParams,
        grid: &RadialGrid,
        run: &RunConfig,
        summary: &RunSummary,
        regime: RegimeReport,
        ledger: Option<EnergyLedger>,
        bracket: BracketEnvelope,
        final_norms: Option<FinalNorms>,
    ) -> Self {
        RunReport {
            params: *params,
            grid: *grid,
            run: *run,
            termination: summary.termination.label().to_string(),
            exit_code: summary.termination.exit_code(),
            steps: summary.steps,
            final_time: summary.final_time,
            v_min_global: summary.v_min_global,
            v_max_global: summary.v_max_global,
            fault_message: summary.fault_message.clone(),
            regime,
            ledger,
            kanel_bracket: bracket,
            final_norms,
        }
    }
}

/// Serialize any report as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| crate::Error::Io(std::io::Error::other(e)))?;
    write_file(path, &format!("{text}\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regime::classify;

    #[test]
    fn fmt_roundtrips_exactly() {
        for &x in &[
            std::f64::consts::PI,
            -1.0 / 3.0,
            6.02e23,
            -2.2250738585072014e-308,
            0.1 + 0.2,
        ] {
            let s = fmt_g(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {s}");
        }
    }

    #[test]
    fn raster_csv_shape() {
        let dir = std::env::temp_dir().join("korteweg-raster-test");
        let path = dir.join("raster.csv");
        let verdicts = vec![
            classify(0.5, -2.5, 1.4, ModelKind::Kazhikhov).unwrap(),
            classify(0.5, -1.0, 1.4, ModelKind::Kazhikhov).unwrap(),
        ];
        write_raster_csv(&path, &verdicts, ModelKind::Kazhikhov).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("alpha,beta,gamma,theorem,matched_cases,slack_min_i"));
        assert!(lines[1].contains(",kazhikhov,i,"));
        assert!(lines[2].contains(",kazhikhov,,"));
        std::fs::remove_dir_all(&dir).ok();
    }
}
