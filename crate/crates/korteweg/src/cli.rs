//! Command implementations behind the `korteweg` binary.
//!
//! Exit codes are a total function of the outcome: 0 success, 1 negative
//! classification / out-of-band convergence order, 2 configuration or
//! argument errors, 3 positivity fault, 4 step-size underflow, 5 non-finite
//! fields (or a faulted convergence ladder).

use crate::config::{
    build_initial_state, load_config, load_sweep_config, parse_family, ConfigFile, OutputSpec,
    SweepMode,
};
use crate::diagnostics::LedgerTracker;
use crate::geometry::{to_eulerian, RadialGrid};
use crate::integrate::{run, DiagnosticsSink, RunSummary, Termination};
use crate::model::{ModelKind, ModelParams};
use crate::output::{
    fmt_g, write_empty_raster_csv, write_eulerian_csv, write_json, write_raster_csv,
    write_state_csv, write_timeseries_csv, BracketEnvelope, FinalNorms, RegimeReport, RunReport,
};
use crate::regime::{classify, sweep_regions, RegimeVerdict};
use crate::spatial::State;
use crate::verify::{
    mms_full_order, mms_spatial_order, FullOrderVerdict, ManufacturedCase, MmsFullReport,
    MmsSpatialReport,
};
use rayon::prelude::*;
use serde::Serialize;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_MATCH: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

fn fail_config(err: impl std::fmt::Display) -> i32 {
    eprintln!("error: {err}");
    EXIT_CONFIG
}

/// Observer that feeds the ledger tracker, keeps the last snapshot state and
/// optionally writes one state CSV per snapshot.
struct SimSink<'a> {
    tracker: &'a mut LedgerTracker,
    grid: RadialGrid,
    snapshot_dir: Option<PathBuf>,
    io_error: Option<String>,
    last_state: Option<State>,
}

impl DiagnosticsSink for SimSink<'_> {
    fn on_step(&mut self, step: usize, dt: f64, before: &State, after: &State) {
        self.tracker.on_step(step, dt, before, after);
    }

    fn on_snapshot(&mut self, step: usize, t: f64, state: &State) {
        self.tracker.on_snapshot(step, t, state);
        self.last_state = Some(state.clone());
        if let Some(dir) = &self.snapshot_dir {
            let path = dir.join(format!("state_{step:08}.csv"));
            if let Err(e) = write_state_csv(&path, state, &self.grid) {
                self.io_error.get_or_insert_with(|| e.to_string());
            }
        }
    }
}

/// Run one simulation from a config file and write its outputs.
pub fn cmd_simulate(config_path: &Path) -> i32 {
    let cfg = match load_config(config_path) {
        Ok(cfg) => cfg,
        Err(e) => return fail_config(e),
    };
    match simulate(&cfg) {
        Ok(outcome) => outcome,
        Err(e) => fail_config(e),
    }
}

fn simulate(cfg: &ConfigFile) -> crate::Result<i32> {
    let verdict = classify(cfg.model.alpha, cfg.model.beta, cfg.model.gamma, cfg.model.kind)?;
    print_regime_line(&verdict);

    let initial = build_initial_state(&cfg.initial, &cfg.grid, &cfg.model)?;
    let snapshot_dir = if cfg.output.snapshots {
        let dir = cfg.output.dir.join("snapshots");
        std::fs::create_dir_all(&dir)?;
        Some(dir)
    } else {
        None
    };
    let mut tracker = LedgerTracker::new(cfg.grid, cfg.model)
        .with_accumulation_stride(cfg.output.acc_every);
    if !cfg.output.bracket {
        tracker = tracker.without_bracket();
    }
    let mut sink = SimSink {
        tracker: &mut tracker,
        grid: cfg.grid,
        snapshot_dir,
        io_error: None,
        last_state: None,
    };
    let summary = run(initial, &cfg.grid, &cfg.model, &cfg.run, &mut sink)?;
    let io_error = sink.io_error.take();
    let last_state = sink.last_state.take();

    write_run_outputs(cfg, &summary, &tracker, &verdict)?;
    if let Some(state) = &last_state {
        write_eulerian_if_requested(cfg, state)?;
    }
    print_summary_lines(&summary, &tracker);
    if let Some(e) = io_error {
        eprintln!("error: failed to write snapshots: {e}");
        return Ok(EXIT_CONFIG);
    }
    Ok(summary.termination.exit_code())
}

fn print_regime_line(verdict: &RegimeVerdict) {
    let matched = verdict.matched_cases();
    if matched.is_empty() {
        eprintln!(
            "warning: no admissibility case of the {} family matches (alpha, beta, gamma) = ({}, {}, {}); proceeding anyway",
            verdict.kind, verdict.alpha, verdict.beta, verdict.gamma
        );
    } else {
        let labels: Vec<&str> = matched.iter().map(|c| c.as_str()).collect();
        println!("regime: {} case {}", verdict.kind, labels.join(", "));
    }
}

fn print_summary_lines(summary: &RunSummary, tracker: &LedgerTracker) {
    println!(
        "termination: {} after {} steps at t = {:.6}",
        summary.termination, summary.steps, summary.final_time
    );
    println!(
        "volume range: [{:.6}, {:.6}]",
        summary.v_min_global, summary.v_max_global
    );
    if let Some(ledger) = tracker.ledger() {
        println!(
            "ledger: E0 = {:.6e}, E = {:.6e}, D_cum = {:.6e}, leak = {:.6e}, defect = {:.3e}",
            ledger.e0, ledger.e, ledger.d_cum, ledger.boundary_leak, ledger.defect
        );
    }
    if let Some(msg) = &summary.fault_message {
        eprintln!("fault: {msg}");
    }
}

fn write_run_outputs(
    cfg: &ConfigFile,
    summary: &RunSummary,
    tracker: &LedgerTracker,
    verdict: &RegimeVerdict,
) -> crate::Result<()> {
    let out = &cfg.output;
    if let Some(name) = &out.timeseries {
        write_timeseries_csv(&out.dir.join(name), tracker.rows())?;
    }
    if let Some(name) = &out.summary {
        let (lower, upper) = tracker.bracket_envelope();
        let final_norms = tracker.rows().last().map(|r| FinalNorms {
            v_minus_1_h1: r.norm_v_minus_1_h1,
            u_h1: r.norm_u_h1,
            vx_1r: r.norm_vx_1r,
        });
        let report = RunReport::assemble(
            &cfg.model,
            &cfg.grid,
            &cfg.run,
            summary,
            RegimeReport::from_verdict(verdict),
            tracker.ledger(),
            BracketEnvelope { lower, upper },
            final_norms,
        );
        write_json(&out.dir.join(name), &report)?;
    }
    Ok(())
}

/// Classify one (α, β, γ) triple and print per-inequality slacks.
pub fn cmd_classify(alpha: f64, beta: f64, gamma: f64, family: &str) -> i32 {
    let kind = match parse_family(family) {
        Ok(kind) => kind,
        Err(e) => return fail_config(e),
    };
    let verdict = match classify(alpha, beta, gamma, kind) {
        Ok(v) => v,
        Err(e) => return fail_config(e),
    };
    println!(
        "family {} at (alpha, beta, gamma) = ({alpha}, {beta}, {gamma})",
        kind.label()
    );
    for case in &verdict.cases {
        let status = if case.matched {
            "matched"
        } else if !case.satisfiable {
            "empty at this beta"
        } else {
            "not matched"
        };
        println!("case {}: {status}", case.case);
        for s in &case.slacks {
            println!(
                "    {:<12} slack = {:+.6e}{}",
                s.label,
                s.slack,
                if s.strict { " (strict)" } else { "" }
            );
        }
    }
    let matched = verdict.matched_cases();
    if matched.is_empty() {
        println!("matched cases: none");
        EXIT_NO_MATCH
    } else {
        let labels: Vec<&str> = matched.iter().map(|c| c.as_str()).collect();
        println!("matched cases: {}", labels.join(", "));
        EXIT_OK
    }
}

#[derive(Debug, Clone, Serialize)]
struct BatchRow {
    alpha: f64,
    beta: f64,
    termination: String,
    steps: usize,
    v_min: f64,
    v_max: f64,
    e_final: f64,
    defect_final: f64,
    matched_cases: String,
}

/// Region raster and/or batch simulations over parameter ranges.
pub fn cmd_sweep(config_path: &Path) -> i32 {
    let sweep = match load_sweep_config(config_path) {
        Ok(s) => s,
        Err(e) => return fail_config(e),
    };
    match sweep.spec.mode {
        SweepMode::Region => {
            let family = sweep.spec.family.expect("validated by parser");
            let gamma = sweep.spec.gamma.expect("validated by parser");
            let raster_path = sweep
                .output
                .dir
                .join(sweep.spec.raster.as_deref().unwrap_or("raster.csv"));
            if sweep.spec.alpha.is_empty() || sweep.spec.beta.is_empty() {
                if let Err(e) = write_empty_raster_csv(&raster_path, family) {
                    return fail_config(e);
                }
                println!("empty parameter range: wrote header-only raster");
                return EXIT_OK;
            }
            let verdicts = match sweep_regions(
                (sweep.spec.alpha.lo, sweep.spec.alpha.hi),
                (sweep.spec.beta.lo, sweep.spec.beta.hi),
                gamma,
                family,
                (sweep.spec.alpha.count, sweep.spec.beta.count),
            ) {
                Ok(v) => v,
                Err(e) => return fail_config(e),
            };
            if let Err(e) = write_raster_csv(&raster_path, &verdicts, family) {
                return fail_config(e);
            }
            let matched = verdicts.iter().filter(|v| v.is_matched()).count();
            println!(
                "raster: {} cells, {} matched -> {}",
                verdicts.len(),
                matched,
                raster_path.display()
            );
            EXIT_OK
        }
        SweepMode::Batch => {
            let Some(base) = sweep.base.as_ref() else {
                return fail_config("batch sweep needs the simulate sections");
            };
            let name = sweep.spec.summary.as_deref().unwrap_or("batch.csv");
            batch_sweep(
                base,
                &sweep.spec.alpha.values(),
                &sweep.spec.beta.values(),
                &sweep.output,
                name,
            )
        }
    }
}

fn batch_sweep(
    base: &ConfigFile,
    alphas: &[f64],
    betas: &[f64],
    output: &OutputSpec,
    summary_name: &str,
) -> i32 {
    let summary_path = output.dir.join(summary_name);
    let members: Vec<(f64, f64)> = betas
        .iter()
        .flat_map(|&b| alphas.iter().map(move |&a| (a, b)))
        .collect();
    if members.is_empty() {
        if let Err(e) = write_batch_csv(&summary_path, &[]) {
            return fail_config(e);
        }
        println!("empty parameter range: wrote header-only batch summary");
        return EXIT_OK;
    }
    let results: Vec<crate::Result<(BatchRow, Termination)>> = members
        .par_iter()
        .map(|&(alpha, beta)| {
            let params = ModelParams {
                alpha,
                beta,
                ..base.model
            };
            let verdict = classify(alpha, beta, params.gamma, params.kind)?;
            let initial = build_initial_state(&base.initial, &base.grid, &params)?;
            let mut tracker = LedgerTracker::new(base.grid, params)
                .with_accumulation_stride(output.acc_every);
            if !output.bracket {
                tracker = tracker.without_bracket();
            }
            let summary = run(initial, &base.grid, &params, &base.run, &mut tracker)?;
            let ledger = tracker.ledger();
            let labels: Vec<&str> = verdict.matched_cases().iter().map(|c| c.as_str()).collect();
            Ok((
                BatchRow {
                    alpha,
                    beta,
                    termination: summary.termination.label().to_string(),
                    steps: summary.steps,
                    v_min: summary.v_min_global,
                    v_max: summary.v_max_global,
                    e_final: ledger.map(|l| l.e).unwrap_or(f64::NAN),
                    defect_final: ledger.map(|l| l.defect).unwrap_or(f64::NAN),
                    matched_cases: labels.join(";"),
                },
                summary.termination,
            ))
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    let mut exit = EXIT_OK;
    for r in results {
        match r {
            Ok((row, termination)) => {
                if exit == EXIT_OK && termination != Termination::Completed {
                    exit = termination.exit_code();
                }
                rows.push(row);
            }
            Err(e) => return fail_config(e),
        }
    }
    if let Err(e) = write_batch_csv(&summary_path, &rows) {
        return fail_config(e);
    }
    println!("batch: {} members -> {}", rows.len(), summary_path.display());
    exit
}

fn write_batch_csv(path: &Path, rows: &[BatchRow]) -> crate::Result<()> {
    let mut out = String::new();
    out.push_str("alpha,beta,termination,steps,v_min,v_max,e_final,defect_final,matched_cases\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            fmt_g(r.alpha),
            fmt_g(r.beta),
            r.termination,
            r.steps,
            fmt_g(r.v_min),
            fmt_g(r.v_max),
            fmt_g(r.e_final),
            fmt_g(r.defect_final),
            r.matched_cases,
        ));
    }
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Acceptance band for the spatial consistency order.
pub const SPATIAL_ORDER_BAND: (f64, f64) = (1.8, 2.2);
/// Minimum acceptable full space-time order (dt ∝ dx²).
pub const FULL_ORDER_MIN: f64 = 1.7;

#[derive(Debug, Clone)]
pub struct MmsOptions {
    pub equilibrium: bool,
    pub levels: Vec<usize>,
    pub ladder: Vec<usize>,
    pub dt0: f64,
    pub t_end: f64,
    pub dims: Vec<u32>,
    pub families: Vec<ModelKind>,
    pub out: Option<PathBuf>,
}

impl Default for MmsOptions {
    fn default() -> Self {
        MmsOptions {
            equilibrium: false,
            levels: vec![96, 144, 216, 324],
            ladder: vec![64, 96, 144],
            dt0: 2.0e-4,
            t_end: 0.02,
            dims: vec![2, 3],
            families: vec![ModelKind::Kazhikhov, ModelKind::DensityDependent],
            out: None,
        }
    }
}

#[derive(Debug, Serialize)]
struct MmsCombo {
    family: String,
    dim: u32,
    report: MmsSpatialReport,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct MmsJsonReport {
    case: String,
    spatial: Vec<MmsCombo>,
    full: Option<MmsFullReport>,
    full_pass: Option<bool>,
    pass: bool,
}

fn mms_params(kind: ModelKind, dim: u32) -> ModelParams {
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

/// Run the manufactured-solution ladders and report pass/fail per band.
pub fn cmd_mms(opts: &MmsOptions) -> i32 {
    if opts.levels.len() < 3 || opts.levels.iter().any(|&n| n < 32) || opts.ladder.len() < 2
        || opts.ladder.iter().any(|&n| n < 32)
    {
        eprintln!(
            "insufficient levels: need >= 3 spatial resolutions and >= 2 ladder levels, all with n >= 32"
        );
        return EXIT_NO_MATCH;
    }
    let case = if opts.equilibrium {
        ManufacturedCase::equilibrium()
    } else {
        ManufacturedCase::bump()
    };
    let mut combos = Vec::new();
    let mut all_pass = true;
    for &kind in &opts.families {
        for &dim in &opts.dims {
            let params = mms_params(kind, dim);
            let report = match mms_spatial_order(&case, &params, &opts.levels) {
                Ok(r) => r,
                Err(e) => return fail_config(e),
            };
            let pass = report.is_exact()
                || (report.order >= SPATIAL_ORDER_BAND.0 && report.order <= SPATIAL_ORDER_BAND.1);
            all_pass &= pass;
            println!(
                "spatial {} d={dim}: {} [{}]",
                kind.label(),
                if report.is_exact() {
                    "exact".to_string()
                } else {
                    format!("order {:.3}", report.order)
                },
                if pass { "pass" } else { "FAIL" }
            );
            combos.push(MmsCombo {
                family: kind.label().to_string(),
                dim,
                report,
                pass,
            });
        }
    }

    // full space-time ladder on the first requested combo, dt scaled as dx²
    let params = mms_params(opts.families[0], opts.dims[0]);
    let n0 = opts.ladder[0] as f64 - 1.0;
    let ladder: Vec<(usize, f64)> = opts
        .ladder
        .iter()
        .map(|&n| (n, opts.dt0 * (n0 / (n as f64 - 1.0)).powi(2)))
        .collect();
    let full = match mms_full_order(&case, &params, &ladder, opts.t_end) {
        Ok(r) => r,
        Err(e) => return fail_config(e),
    };
    let full_pass = match &full.verdict {
        FullOrderVerdict::Exact => {
            println!("full {} d={}: exact [pass]", params.kind.label(), params.dim);
            Some(true)
        }
        FullOrderVerdict::Order(q) => {
            let ok = *q >= FULL_ORDER_MIN;
            println!(
                "full {} d={}: order {q:.3} [{}]",
                params.kind.label(),
                params.dim,
                if ok { "pass" } else { "FAIL" }
            );
            Some(ok)
        }
        FullOrderVerdict::Fault { level_n, reason } => {
            eprintln!("full ladder faulted at n = {level_n}: {reason}");
            None
        }
    };

    let json = MmsJsonReport {
        case: if opts.equilibrium { "equilibrium" } else { "bump" }.to_string(),
        spatial: combos,
        full: Some(full.clone()),
        full_pass,
        pass: all_pass && full_pass.unwrap_or(false),
    };
    if let Some(path) = &opts.out {
        if let Err(e) = write_json(path, &json) {
            return fail_config(e);
        }
    }
    match full_pass {
        None => 5,
        Some(ok) if ok && all_pass => EXIT_OK,
        _ => EXIT_NO_MATCH,
    }
}

/// Write the final Eulerian table of a completed run when requested.
pub fn write_eulerian_if_requested(
    cfg: &ConfigFile,
    state: &State,
) -> crate::Result<()> {
    if let Some(name) = &cfg.output.eulerian_final {
        let table = to_eulerian(state, &cfg.grid, &cfg.model)?;
        write_eulerian_csv(&cfg.output.dir.join(name), &table)?;
    }
    Ok(())
}
