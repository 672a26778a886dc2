//! End-to-end tests of the `korteweg` binary: exit codes, file outputs, and
//! the snapshot/restart round trip.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_korteweg"))
}

fn write(path: &Path, text: &str) {
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    std::fs::write(path, text).unwrap();
}

fn base_config(dir: &Path, n: usize, t_end: f64, extra_run: &str, extra_output: &str) -> String {
    format!(
        r#"
[model]
kind = kazhikhov
alpha = 1.0
beta = -3.0
gamma = 2.0
mu_tilde = 0.75
lambda_tilde = 0.0
dim = 2
a = 1.0

[grid]
n = {n}
x_max = 24.0

[run]
t_end = {t_end}
snapshot_every = 200
{extra_run}

[initial]
v = gaussian-bump(center=8, width=1.2, amplitude=0.12)
u = constant(0)

[output]
dir = {dir}
bracket = false
{extra_output}
"#,
        dir = dir.display()
    )
}

#[test]
fn classify_exit_codes() {
    let ok = bin()
        .args(["classify", "0", "-2.5", "1.4", "--family", "t1.1"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{ok:?}");
    let text = String::from_utf8_lossy(&ok.stdout);
    assert!(text.contains("matched cases: i"), "{text}");

    let miss = bin()
        .args(["classify", "0", "-1", "1.4", "--family", "kazhikhov"])
        .output()
        .unwrap();
    assert_eq!(miss.status.code(), Some(1));

    let eq_case = bin()
        .args(["classify", "-0.25", "-3.5", "2", "--family", "t1.2"])
        .output()
        .unwrap();
    assert_eq!(eq_case.status.code(), Some(0));
    let text = String::from_utf8_lossy(&eq_case.stdout);
    assert!(text.contains("ii"), "{text}");

    let bad = bin()
        .args(["classify", "0", "-2.5", "1.4", "--family", "unknown"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));

    let unparseable = bin().args(["classify", "zero", "-2.5", "1.4"]).output().unwrap();
    assert_eq!(unparseable.status.code(), Some(2));
}

#[test]
fn simulate_writes_outputs_and_completes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = tmp.path().join("run.cfg");
    write(
        &cfg,
        &base_config(&out, 128, 0.02, "", "eulerian_final = final_table.csv"),
    );
    let res = bin().args(["simulate"]).arg(&cfg).output().unwrap();
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("regime: kazhikhov case i"), "{stdout}");

    let ts = std::fs::read_to_string(out.join("timeseries.csv")).unwrap();
    assert!(ts.starts_with("step,t,E,D_cum,boundary_leak,defect"));
    assert!(ts.lines().count() > 2);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["termination"], "completed");
    assert_eq!(summary["exit_code"], 0);
    assert!(summary["ledger"]["defect"].as_f64().unwrap().abs() < 1e-4);
    assert_eq!(summary["regime"]["matched_cases"][0], "i");

    let table = std::fs::read_to_string(out.join("final_table.csv")).unwrap();
    assert!(table.starts_with("r,rho,u_radial"));
    assert_eq!(table.lines().count(), 129);
}

#[test]
fn unmatched_regime_warns_but_proceeds() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = tmp.path().join("warn.cfg");
    // beta = -1 sits outside every admissibility case
    write(&cfg, &base_config(&out, 96, 0.002, "", "").replace("beta = -3.0", "beta = -1.0"));
    let res = bin().args(["simulate"]).arg(&cfg).output().unwrap();
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("no admissibility case"), "{stderr}");
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = tmp.path().join("bad.cfg");
    write(&cfg, &base_config(&out, 64, 0.01, "", "").replace("snapshot_every", "snapshot_evry"));
    let res = bin().args(["simulate"]).arg(&cfg).output().unwrap();
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("snapshot_evry"));

    let res = bin().args(["simulate", "/nonexistent/path.cfg"]).output().unwrap();
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn fault_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();

    // oversized fixed step: positivity (3) or non-finite (5), never 0
    let cfg = tmp.path().join("blow.cfg");
    write(
        &cfg,
        &base_config(&tmp.path().join("o1"), 128, 0.5, "dt_fixed = 5e-2", ""),
    );
    let res = bin().args(["simulate"]).arg(&cfg).output().unwrap();
    let code = res.status.code().unwrap();
    assert!(code == 3 || code == 5, "expected fault exit, got {code}");

    // impossible dt_min: underflow (4)
    let cfg = tmp.path().join("under.cfg");
    write(
        &cfg,
        &base_config(&tmp.path().join("o2"), 128, 0.5, "dt_min = 1.0\ndt_init = 1.0", ""),
    );
    let res = bin().args(["simulate"]).arg(&cfg).output().unwrap();
    assert_eq!(res.status.code(), Some(4));
}

#[test]
fn snapshot_restart_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let out1 = tmp.path().join("first");
    let cfg1 = tmp.path().join("first.cfg");
    write(&cfg1, &base_config(&out1, 128, 0.02, "", "snapshots = true"));
    let res = bin().args(["simulate"]).arg(&cfg1).output().unwrap();
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));

    let snap_dir = out1.join("snapshots");
    let mut snaps: Vec<PathBuf> = std::fs::read_dir(&snap_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    snaps.sort();
    assert!(snaps.len() >= 2, "expected several snapshot files");
    let last = snaps.last().unwrap();

    // restart from the written snapshot
    let out2 = tmp.path().join("second");
    let cfg2 = tmp.path().join("second.cfg");
    let mut text = base_config(&out2, 128, 0.01, "", "");
    text = text.replace(
        "v = gaussian-bump(center=8, width=1.2, amplitude=0.12)\nu = constant(0)",
        &format!("file = {}", last.display()),
    );
    write(&cfg2, &text);
    let res = bin().args(["simulate"]).arg(&cfg2).output().unwrap();
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));

    // defect accounting restarts cleanly: first row is exactly zero, and the
    // continued run stays balanced
    let ts = std::fs::read_to_string(out2.join("timeseries.csv")).unwrap();
    let mut lines = ts.lines().skip(1);
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    let defect0: f64 = first[5].parse().unwrap();
    assert_eq!(defect0, 0.0);
    let last_row: Vec<&str> = ts.lines().last().unwrap().split(',').collect();
    let defect_end: f64 = last_row[5].parse().unwrap();
    assert!(defect_end.abs() < 1e-4, "restarted defect {defect_end}");
}

#[test]
fn sweep_region_raster() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    let cfg = tmp.path().join("region.cfg");
    write(
        &cfg,
        &format!(
            r#"
[sweep]
mode = region
alpha = -1:1:3
beta = -2.9:-2.1:3
gamma = 1.0
family = kazhikhov
raster = raster.csv

[output]
dir = {}
"#,
            out.display()
        ),
    );
    let res = bin().args(["sweep"]).arg(&cfg).output().unwrap();
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let raster = std::fs::read_to_string(out.join("raster.csv")).unwrap();
    let lines: Vec<&str> = raster.lines().collect();
    assert_eq!(lines.len(), 10); // header + 9 cells
    for row in &lines[1..] {
        assert!(row.contains(",i,") || row.ends_with(",i"), "{row}");
    }

    // empty intersection: header-only file, exit 0
    let cfg2 = tmp.path().join("empty.cfg");
    write(
        &cfg2,
        &format!(
            r#"
[sweep]
mode = region
alpha = 1:-1:0
beta = -2.9:-2.1:3
gamma = 1.0
family = kazhikhov
raster = empty.csv

[output]
dir = {}
"#,
            out.display()
        ),
    );
    let res = bin().args(["sweep"]).arg(&cfg2).output().unwrap();
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let raster = std::fs::read_to_string(out.join("empty.csv")).unwrap();
    assert_eq!(raster.lines().count(), 1);
}

#[test]
fn sweep_batch_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("batch");
    let cfg = tmp.path().join("batch.cfg");
    let base = base_config(&out, 96, 0.005, "", "");
    write(
        &cfg,
        &format!(
            r#"{base}
[sweep]
mode = batch
alpha = 0.5:1.5:2
beta = -3:-2.5:2
summary = batch.csv
"#
        ),
    );
    let res = bin().args(["sweep"]).arg(&cfg).output().unwrap();
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let batch = std::fs::read_to_string(out.join("batch.csv")).unwrap();
    let lines: Vec<&str> = batch.lines().collect();
    assert_eq!(lines.len(), 5); // header + 4 members
    assert!(lines[0].starts_with("alpha,beta,termination"));
    for row in &lines[1..] {
        assert!(row.contains("completed"), "{row}");
    }
}

#[test]
fn mms_insufficient_levels() {
    let res = bin()
        .args(["mms", "--levels", "8,12,16"])
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("insufficient levels"));
}

#[test]
fn golden_configs_stay_valid() {
    // the shipped sample configs must keep parsing and running
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let tmp = tempfile::tempdir().unwrap();

    for name in ["bump.cfg", "density_dependent.cfg"] {
        let text = std::fs::read_to_string(root.join(name)).unwrap();
        // shorten the horizon and redirect outputs to keep the test quick
        let text = text
            .replace("t_end = 0.25", "t_end = 0.02")
            .replace("dir = out/", &format!("dir = {}/", tmp.path().display()));
        let cfg = tmp.path().join(name);
        write(&cfg, &text);
        let res = bin().args(["simulate"]).arg(&cfg).output().unwrap();
        assert_eq!(
            res.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&res.stderr)
        );
    }

    for name in ["sweep_region.cfg", "sweep_batch.cfg"] {
        let text = std::fs::read_to_string(root.join(name)).unwrap();
        let text = text
            .replace("alpha = -3:1:161", "alpha = -3:1:9")
            .replace("beta = -6.5:-1.5:201", "beta = -6.5:-1.5:9")
            .replace("t_end = 0.05", "t_end = 0.005")
            .replace("dir = out/", &format!("dir = {}/", tmp.path().display()));
        let cfg = tmp.path().join(name);
        write(&cfg, &text);
        let res = bin().args(["sweep"]).arg(&cfg).output().unwrap();
        assert_eq!(
            res.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&res.stderr)
        );
    }
}

#[test]
fn mms_equilibrium_is_exact_and_writes_report() {
    let tmp = tempfile::tempdir().unwrap();
    let report_path = tmp.path().join("mms.json");
    let res = bin()
        .args([
            "mms",
            "--equilibrium",
            "--levels",
            "32,48,64",
            "--ladder",
            "32,48",
            "--t-end",
            "0.002",
            "--dims",
            "2",
            "--families",
            "kazhikhov",
            "--out",
        ])
        .arg(&report_path)
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("exact"), "{stdout}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["case"], "equilibrium");
    assert_eq!(report["pass"], true);
}
