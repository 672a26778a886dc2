//! Plain-text run configuration: `key = value` pairs in named sections, with
//! unknown sections and keys rejected outright so typos cannot silently fall
//! back to defaults.
//!
//! ```text
//! [model]
//! kind = kazhikhov            # or density-dependent
//! alpha = 1.0
//! beta = -3.0
//! gamma = 2.0
//! mu_tilde = 1.0
//! lambda_tilde = 0.2
//! dim = 2
//! a = 1.0
//!
//! [grid]
//! n = 512
//! x_max = 16.0
//!
//! [run]
//! t_end = 0.5
//! snapshot_every = 200        # cfl_visc, cfl_cap, dt_min, dt_init, v_floor,
//!                             # dt_fixed are optional
//! [initial]
//! v = gaussian-bump(center=6, width=1, amplitude=0.1)
//! u = constant(0)             # or: file = state.csv
//!
//! [output]
//! dir = out/run1              # timeseries, summary, snapshots,
//!                             # eulerian_final, acc_every, bracket optional
//! ```
//!
//! A sweep adds a `[sweep]` section with `mode = region` (raster of the
//! admissibility classifier) or `mode = batch` (one simulation per grid
//! point of the α/β ranges).

use crate::geometry::{radius_from_state, Pchip, RadialGrid};
use crate::integrate::RunConfig;
use crate::model::{ModelKind, ModelParams};
use crate::spatial::State;
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Parsed simulate configuration.
#[derive(Debug, Clone)]
pub struct ConfigFile {
    pub model: ModelParams,
    pub grid: RadialGrid,
    pub run: RunConfig,
    pub initial: InitialSpec,
    pub output: OutputSpec,
}

/// Initial-data descriptor for one field.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    Constant(f64),
    GaussianBump { center: f64, width: f64, amplitude: f64 },
    TanhFront { center: f64, width: f64, left: f64, right: f64 },
}

impl FieldSpec {
    /// Sample the descriptor; bump profiles ride on the field's ambient
    /// value (1 for v, 0 for u), front and constant profiles are absolute.
    pub fn sample(&self, x: f64, ambient: f64) -> f64 {
        match *self {
            FieldSpec::Constant(c) => c,
            FieldSpec::GaussianBump {
                center,
                width,
                amplitude,
            } => {
                let xi = (x - center) / width;
                ambient + amplitude * (-xi * xi).exp()
            }
            FieldSpec::TanhFront {
                center,
                width,
                left,
                right,
            } => left + (right - left) * 0.5 * (1.0 + ((x - center) / width).tanh()),
        }
    }
}

/// Initial data: built-in descriptors or a state file.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Fields { v: FieldSpec, u: FieldSpec },
    File(PathBuf),
}

/// Output destinations and diagnostics options.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub timeseries: Option<String>,
    pub summary: Option<String>,
    /// Write one state CSV per snapshot step.
    pub snapshots: bool,
    pub eulerian_final: Option<String>,
    /// Ledger accumulation stride in accepted steps.
    pub acc_every: usize,
    /// Evaluate the Kanel bracket at every snapshot.
    pub bracket: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: PathBuf::from("out"),
            timeseries: Some("timeseries.csv".to_string()),
            summary: Some("summary.json".to_string()),
            snapshots: false,
            eulerian_final: None,
            acc_every: 1,
            bracket: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Region,
    Batch,
}

/// `lo:hi:count` range (or a single value for a degenerate range).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl RangeSpec {
    pub fn is_empty(&self) -> bool {
        self.count == 0 || self.hi < self.lo
    }

    pub fn values(&self) -> Vec<f64> {
        if self.is_empty() {
            return Vec::new();
        }
        if self.count == 1 {
            return vec![self.lo];
        }
        (0..self.count)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub alpha: RangeSpec,
    pub beta: RangeSpec,
    /// Region mode only; batch members take γ from `[model]`.
    pub gamma: Option<f64>,
    /// Region mode only; batch members take the family from `[model]`.
    pub family: Option<ModelKind>,
    pub raster: Option<String>,
    pub summary: Option<String>,
}

/// Sweep configuration: the `[sweep]` spec plus (for batch mode) the full
/// simulate configuration it modulates.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub spec: SweepSpec,
    pub base: Option<ConfigFile>,
    pub output: OutputSpec,
}

// ---------------------------------------------------------------------------
// raw section/key parsing

struct Section {
    name: String,
    line: usize,
    entries: BTreeMap<String, (String, usize)>,
    consumed: Vec<String>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<String> {
        self.consumed.push(key.to_string());
        self.entries.remove(key).map(|(v, _)| v)
    }

    fn require(&mut self, key: &str) -> Result<String> {
        self.take(key).ok_or_else(|| {
            Error::config(format!("section [{}] is missing required key '{key}'", self.name))
        })
    }

    fn finish(self) -> Result<()> {
        if let Some((key, (_, line))) = self.entries.into_iter().next() {
            return Err(Error::config(format!(
                "unknown key '{key}' in section [{}] (line {line})",
                self.name
            )));
        }
        Ok(())
    }
}

struct RawConfig {
    sections: BTreeMap<String, Section>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<RawConfig> {
        let mut sections: BTreeMap<String, Section> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| Error::config(format!("malformed section header on line {line_no}")))?
                    .trim()
                    .to_string();
                if sections.contains_key(&name) {
                    return Err(Error::config(format!(
                        "duplicate section [{name}] on line {line_no}"
                    )));
                }
                sections.insert(
                    name.clone(),
                    Section {
                        name: name.clone(),
                        line: line_no,
                        entries: BTreeMap::new(),
                        consumed: Vec::new(),
                    },
                );
                current = Some(name);
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("expected 'key = value' on line {line_no}: '{line}'"))
            })?;
            let section = current
                .as_ref()
                .ok_or_else(|| Error::config(format!("key outside any section on line {line_no}")))?;
            let entry = sections.get_mut(section).expect("section exists");
            let key = key.trim().to_string();
            if entry.entries.contains_key(&key) {
                return Err(Error::config(format!(
                    "duplicate key '{key}' in section [{section}] (line {line_no})"
                )));
            }
            entry.entries.insert(key, (value.trim().to_string(), line_no));
        }
        Ok(RawConfig { sections })
    }

    fn take_section(&mut self, name: &str) -> Result<Section> {
        self.sections
            .remove(name)
            .ok_or_else(|| Error::config(format!("missing required section [{name}]")))
    }

    fn finish(self, allowed_leftovers: &[&str]) -> Result<()> {
        for (name, sec) in self.sections {
            if !allowed_leftovers.contains(&name.as_str()) {
                return Err(Error::config(format!(
                    "unknown section [{name}] (line {})",
                    sec.line
                )));
            }
        }
        Ok(())
    }
}

fn parse_f64(section: &str, key: &str, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::config(format!("[{section}] {key}: '{s}' is not a number")))
}

fn parse_usize(section: &str, key: &str, s: &str) -> Result<usize> {
    s.parse::<usize>()
        .map_err(|_| Error::config(format!("[{section}] {key}: '{s}' is not a non-negative integer")))
}

fn parse_bool(section: &str, key: &str, s: &str) -> Result<bool> {
    match s {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        _ => Err(Error::config(format!("[{section}] {key}: '{s}' is not a boolean"))),
    }
}

/// Family names accepted on the CLI and in config files. The admissibility
/// statements are tied one-to-one to the viscosity families, so the
/// tokens `t1.1`/`t1.2` select the Kazhikhov and density-dependent family
/// respectively.
pub fn parse_family(s: &str) -> Result<ModelKind> {
    match s.to_ascii_lowercase().as_str() {
        "kazhikhov" | "k" | "t1.1" | "t11" | "1" => Ok(ModelKind::Kazhikhov),
        "density-dependent" | "densitydependent" | "dd" | "t1.2" | "t12" | "2" => {
            Ok(ModelKind::DensityDependent)
        }
        other => Err(Error::config(format!(
            "unknown family '{other}' (expected kazhikhov or density-dependent)"
        ))),
    }
}

fn parse_field_spec(section: &str, key: &str, s: &str) -> Result<FieldSpec> {
    let err = |msg: &str| Error::config(format!("[{section}] {key}: {msg} in '{s}'"));
    let open = s.find('(').ok_or_else(|| err("expected 'name(...)'"))?;
    if !s.ends_with(')') {
        return Err(err("missing closing parenthesis"));
    }
    let name = s[..open].trim();
    let body = &s[open + 1..s.len() - 1];
    match name {
        "constant" => {
            let value = body
                .trim()
                .parse::<f64>()
                .map_err(|_| err("constant takes one number"))?;
            Ok(FieldSpec::Constant(value))
        }
        "gaussian-bump" | "tanh-front" => {
            let mut args: BTreeMap<String, f64> = BTreeMap::new();
            for part in body.split(',') {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| err("expected key=value arguments"))?;
                let v = v
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| err("argument is not a number"))?;
                args.insert(k.trim().to_string(), v);
            }
            let mut grab = |arg: &str| {
                args.remove(arg)
                    .ok_or_else(|| err(&format!("missing argument '{arg}'")))
            };
            let spec = if name == "gaussian-bump" {
                FieldSpec::GaussianBump {
                    center: grab("center")?,
                    width: grab("width")?,
                    amplitude: grab("amplitude")?,
                }
            } else {
                FieldSpec::TanhFront {
                    center: grab("center")?,
                    width: grab("width")?,
                    left: grab("left")?,
                    right: grab("right")?,
                }
            };
            if let Some(extra) = args.keys().next() {
                return Err(err(&format!("unknown argument '{extra}'")));
            }
            match spec {
                FieldSpec::GaussianBump { width, .. } | FieldSpec::TanhFront { width, .. }
                    if !(width > 0.0) =>
                {
                    Err(err("width must be positive"))
                }
                _ => Ok(spec),
            }
        }
        other => Err(err(&format!(
            "unknown descriptor '{other}' (expected constant, gaussian-bump, tanh-front or file)"
        ))),
    }
}

fn parse_range(section: &str, key: &str, s: &str) -> Result<RangeSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => {
            let v = parse_f64(section, key, parts[0])?;
            Ok(RangeSpec { lo: v, hi: v, count: 1 })
        }
        3 => {
            let lo = parse_f64(section, key, parts[0])?;
            let hi = parse_f64(section, key, parts[1])?;
            let count = parse_usize(section, key, parts[2])?;
            if count == 1 && lo != hi {
                return Err(Error::config(format!(
                    "[{section}] {key}: a count of 1 needs lo == hi"
                )));
            }
            Ok(RangeSpec { lo, hi, count })
        }
        _ => Err(Error::config(format!(
            "[{section}] {key}: expected 'value' or 'lo:hi:count', got '{s}'"
        ))),
    }
}

fn build_model(mut sec: Section) -> Result<ModelParams> {
    let kind = parse_family(&sec.require("kind")?)?;
    let params = ModelParams {
        kind,
        alpha: parse_f64("model", "alpha", &sec.require("alpha")?)?,
        beta: parse_f64("model", "beta", &sec.require("beta")?)?,
        gamma: parse_f64("model", "gamma", &sec.require("gamma")?)?,
        mu_tilde: parse_f64("model", "mu_tilde", &sec.require("mu_tilde")?)?,
        lambda_tilde: parse_f64("model", "lambda_tilde", &sec.require("lambda_tilde")?)?,
        dim: parse_usize("model", "dim", &sec.require("dim")?)? as u32,
        a: parse_f64("model", "a", &sec.require("a")?)?,
    };
    sec.finish()?;
    let violations = params.validate();
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::config(format!(
            "inadmissible model parameters: {}",
            list.join("; ")
        )));
    }
    Ok(params)
}

fn build_grid(mut sec: Section) -> Result<RadialGrid> {
    let n = parse_usize("grid", "n", &sec.require("n")?)?;
    let x_max = parse_f64("grid", "x_max", &sec.require("x_max")?)?;
    sec.finish()?;
    if n < 5 {
        return Err(Error::config(format!("grid needs n >= 5, got {n}")));
    }
    RadialGrid::new(n, x_max)
}

fn build_run(mut sec: Section) -> Result<RunConfig> {
    let defaults = RunConfig::default();
    let mut run = RunConfig {
        t_end: parse_f64("run", "t_end", &sec.require("t_end")?)?,
        ..defaults
    };
    if let Some(s) = sec.take("cfl_visc") {
        run.cfl_visc = parse_f64("run", "cfl_visc", &s)?;
    }
    if let Some(s) = sec.take("cfl_cap") {
        run.cfl_cap = parse_f64("run", "cfl_cap", &s)?;
    }
    if let Some(s) = sec.take("dt_min") {
        run.dt_min = parse_f64("run", "dt_min", &s)?;
    }
    if let Some(s) = sec.take("dt_init") {
        run.dt_init = parse_f64("run", "dt_init", &s)?;
    }
    if let Some(s) = sec.take("v_floor") {
        run.v_floor = parse_f64("run", "v_floor", &s)?;
    }
    if let Some(s) = sec.take("snapshot_every") {
        run.snapshot_every = parse_usize("run", "snapshot_every", &s)?;
    }
    if let Some(s) = sec.take("dt_fixed") {
        run.dt_fixed = Some(parse_f64("run", "dt_fixed", &s)?);
    }
    sec.finish()?;
    run.validate().map_err(|e| Error::config(e.to_string()))?;
    Ok(run)
}

fn build_initial(mut sec: Section) -> Result<InitialSpec> {
    let file = sec.take("file");
    let v = sec.take("v");
    let u = sec.take("u");
    sec.finish()?;
    match (file, v, u) {
        (Some(path), None, None) => Ok(InitialSpec::File(PathBuf::from(path))),
        (None, Some(v), Some(u)) => Ok(InitialSpec::Fields {
            v: parse_field_spec("initial", "v", &v)?,
            u: parse_field_spec("initial", "u", &u)?,
        }),
        (Some(_), _, _) => Err(Error::config(
            "[initial] 'file' cannot be combined with 'v'/'u'".to_string(),
        )),
        _ => Err(Error::config(
            "[initial] needs either 'file' or both 'v' and 'u'".to_string(),
        )),
    }
}

fn build_output(sec: Option<Section>) -> Result<OutputSpec> {
    let mut out = OutputSpec::default();
    let Some(mut sec) = sec else {
        return Ok(out);
    };
    if let Some(s) = sec.take("dir") {
        out.dir = PathBuf::from(s);
    }
    if let Some(s) = sec.take("timeseries") {
        out.timeseries = if s == "none" { None } else { Some(s) };
    }
    if let Some(s) = sec.take("summary") {
        out.summary = if s == "none" { None } else { Some(s) };
    }
    if let Some(s) = sec.take("snapshots") {
        out.snapshots = parse_bool("output", "snapshots", &s)?;
    }
    if let Some(s) = sec.take("eulerian_final") {
        out.eulerian_final = if s == "none" { None } else { Some(s) };
    }
    if let Some(s) = sec.take("acc_every") {
        out.acc_every = parse_usize("output", "acc_every", &s)?.max(1);
    }
    if let Some(s) = sec.take("bracket") {
        out.bracket = parse_bool("output", "bracket", &s)?;
    }
    sec.finish()?;
    Ok(out)
}

fn build_sweep(mut sec: Section) -> Result<SweepSpec> {
    let mode = match sec.require("mode")?.as_str() {
        "region" => SweepMode::Region,
        "batch" => SweepMode::Batch,
        other => {
            return Err(Error::config(format!(
                "[sweep] mode must be 'region' or 'batch', got '{other}'"
            )))
        }
    };
    let alpha = parse_range("sweep", "alpha", &sec.require("alpha")?)?;
    let beta = parse_range("sweep", "beta", &sec.require("beta")?)?;
    let gamma = sec
        .take("gamma")
        .map(|s| parse_f64("sweep", "gamma", &s))
        .transpose()?;
    let family = sec.take("family").map(|s| parse_family(&s)).transpose()?;
    let raster = sec.take("raster");
    let summary = sec.take("summary");
    sec.finish()?;
    if mode == SweepMode::Region && (gamma.is_none() || family.is_none()) {
        return Err(Error::config(
            "[sweep] region mode needs 'gamma' and 'family'".to_string(),
        ));
    }
    Ok(SweepSpec {
        mode,
        alpha,
        beta,
        gamma,
        family,
        raster,
        summary,
    })
}

/// Parse a simulate configuration.
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut raw = RawConfig::parse(text)?;
    let model = build_model(raw.take_section("model")?)?;
    let grid = build_grid(raw.take_section("grid")?)?;
    let run = build_run(raw.take_section("run")?)?;
    let initial = build_initial(raw.take_section("initial")?)?;
    let output = build_output(raw.sections.remove("output"))?;
    raw.finish(&[])?;
    Ok(ConfigFile {
        model,
        grid,
        run,
        initial,
        output,
    })
}

pub fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// Parse a sweep configuration. Batch mode requires the full simulate
/// sections alongside `[sweep]`.
pub fn parse_sweep_config(text: &str) -> Result<SweepConfig> {
    let mut raw = RawConfig::parse(text)?;
    let spec = build_sweep(raw.take_section("sweep")?)?;
    let output = build_output(raw.sections.remove("output"))?;
    let base = if spec.mode == SweepMode::Batch {
        let model = build_model(raw.take_section("model")?)?;
        let grid = build_grid(raw.take_section("grid")?)?;
        let run = build_run(raw.take_section("run")?)?;
        let initial = build_initial(raw.take_section("initial")?)?;
        Some(ConfigFile {
            model,
            grid,
            run,
            initial,
            output: output.clone(),
        })
    } else {
        // tolerate (and validate) the simulate sections if present
        for name in ["model", "grid", "run", "initial"] {
            if let Some(sec) = raw.sections.remove(name) {
                match name {
                    "model" => drop(build_model(sec)?),
                    "grid" => drop(build_grid(sec)?),
                    "run" => drop(build_run(sec)?),
                    _ => drop(build_initial(sec)?),
                }
            }
        }
        None
    };
    raw.finish(&[])?;
    Ok(SweepConfig { spec, base, output })
}

pub fn load_sweep_config(path: &Path) -> Result<SweepConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_sweep_config(&text)
}

const FARFIELD_TOL: f64 = 1e-8;

/// Build the initial state from a spec, enforcing positivity and the
/// boundary compatibility contract (u(0) = 0, far field (1, 0)).
pub fn build_initial_state(
    spec: &InitialSpec,
    grid: &RadialGrid,
    params: &ModelParams,
) -> Result<State> {
    let (v, u) = match spec {
        InitialSpec::Fields { v, u } => {
            let vv: Vec<f64> = (0..grid.n()).map(|i| v.sample(grid.node(i), 1.0)).collect();
            let uu: Vec<f64> = (0..grid.n()).map(|i| u.sample(grid.node(i), 0.0)).collect();
            (vv, uu)
        }
        InitialSpec::File(path) => return load_state_csv(path, grid, params),
    };
    check_compatibility(&v, &u, grid)?;
    State::new(v, u, grid, params)
}

fn check_compatibility(v: &[f64], u: &[f64], grid: &RadialGrid) -> Result<()> {
    let n = grid.n();
    for (i, &vi) in v.iter().enumerate() {
        if !(vi > 0.0) || !vi.is_finite() {
            return Err(Error::config(format!(
                "initial volume must be positive, v[{i}] = {vi}"
            )));
        }
    }
    if (v[n - 1] - 1.0).abs() > FARFIELD_TOL || u[n - 1].abs() > FARFIELD_TOL {
        return Err(Error::config(format!(
            "initial data do not reach the far-field state (1, 0) at x_max: (v, u) = ({}, {})",
            v[n - 1],
            u[n - 1]
        )));
    }
    if u[0].abs() > FARFIELD_TOL {
        return Err(Error::config(format!(
            "initial velocity must vanish at the inner boundary, u(0) = {}",
            u[0]
        )));
    }
    Ok(())
}

/// Load a state CSV (columns x, v, u, optionally r) and put it on `grid`,
/// resampling through the monotone cubic interpolant when the node sets
/// differ.
pub fn load_state_csv(path: &Path, grid: &RadialGrid, params: &ModelParams) -> Result<State> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read state file {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::config("state file is empty".to_string()))?;
    let cols: Vec<&str> = header.split(',').map(|c| c.trim()).collect();
    if cols.len() < 3 || cols[0] != "x" || cols[1] != "v" || cols[2] != "u" {
        return Err(Error::config(format!(
            "state file must start with header 'x,v,u[,r]', got '{header}'"
        )));
    }
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    let mut us = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 3 {
            return Err(Error::config(format!(
                "state file row {} has fewer than 3 columns",
                idx + 2
            )));
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(format!("state file row {}: bad number '{s}'", idx + 2)))
        };
        xs.push(parse(fields[0])?);
        vs.push(parse(fields[1])?);
        us.push(parse(fields[2])?);
    }
    if xs.len() < 3 {
        return Err(Error::config("state file needs at least 3 rows".to_string()));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("state file x column must be strictly increasing".to_string()));
    }
    let n = grid.n();
    let matches_grid = xs.len() == n
        && xs
            .iter()
            .enumerate()
            .all(|(i, &x)| (x - grid.node(i)).abs() <= 1e-9 * grid.x_max().max(1.0));
    let (v, u) = if matches_grid {
        (vs, us)
    } else {
        if xs[0] > 1e-9 || *xs.last().unwrap() < grid.x_max() - 1e-9 * grid.x_max().max(1.0) {
            return Err(Error::config(format!(
                "state file covers [{}, {}] but the grid needs [0, {}]",
                xs[0],
                xs.last().unwrap(),
                grid.x_max()
            )));
        }
        let vi = Pchip::new(&xs, &vs)?;
        let ui = Pchip::new(&xs, &us)?;
        let v: Vec<f64> = (0..n).map(|i| vi.eval(grid.node(i))).collect();
        let u: Vec<f64> = (0..n).map(|i| ui.eval(grid.node(i))).collect();
        (v, u)
    };
    check_compatibility(&v, &u, grid)?;
    let mut v = v;
    let mut u = u;
    u[0] = 0.0;
    v[n - 1] = 1.0;
    u[n - 1] = 0.0;
    let r = radius_from_state(&v, grid, params)?;
    Ok(State { t: 0.0, v, u, r })
}
