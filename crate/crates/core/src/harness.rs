//! Run configuration, trajectory export, parameter sweeps and
//! analytic-versus-numeric comparison reports.
//!
//! Configs are either `key = value` lines (`#` starts a comment) or a flat
//! JSON object with the same keys. Drive parameters are read in physical
//! units and rescaled so that the sweep velocity is one; with
//! `zero_sweep = true` the linear sweep is switched off and the values are
//! used as given.

use crate::analytic;
use crate::blochpert::{Perturbative, TruncationSpec};
use crate::error::{Error, Result};
use crate::integrate::{propagate_bloch, propagate_tdse, sample_times, BlochVector, SpinState, DEFAULT_TOL};
use crate::model::DriveConfig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub const DEFAULT_WINDOW: (f64, f64) = (-50.0, 50.0);
pub const DEFAULT_STRIDE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Trace,
    Sweep,
    Compare,
    Selftest,
}

/// Everything one run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub mode: Mode,
    pub cfg: DriveConfig,
    pub window: (f64, f64),
    pub tol: f64,
    pub stride: f64,
    pub trunc: TruncationSpec,
    pub output_path: String,
}

impl RunSpec {
    /// Defaults around a given (dimensionless) drive.
    pub fn new(cfg: DriveConfig) -> Self {
        Self {
            mode: Mode::Trace,
            cfg,
            window: DEFAULT_WINDOW,
            tol: DEFAULT_TOL,
            stride: DEFAULT_STRIDE,
            trunc: TruncationSpec::default_for(&cfg),
            output_path: String::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        let (a, b) = self.window;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidConfig(format!("window must satisfy tau_start < tau_end, got ({a}, {b})")));
        }
        if !(self.stride > 0.0 && self.stride.is_finite()) {
            return Err(Error::InvalidConfig(format!("stride must be > 0, got {}", self.stride)));
        }
        TruncationSpec::new(self.trunc.n_max, &self.cfg)?;
        Ok(())
    }
}

enum Raw {
    Num(f64),
    Text(String),
    Bool(bool),
}

fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Ok(x) = s.parse::<f64>() {
        return Some(x);
    }
    // Multiples of pi: `pi`, `-pi/2`, `3*pi/4`, `0.5pi`.
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().ok()?),
        None => (s, 1.0),
    };
    let coef = num.strip_suffix("pi")?.trim().trim_end_matches('*').trim();
    let coef = match coef {
        "" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().ok()?,
    };
    Some(coef * std::f64::consts::PI / den)
}

#[derive(Default)]
struct Draft {
    phys: DriveConfig,
    zero_sweep: bool,
    mode: Option<Mode>,
    window: (Option<f64>, Option<f64>),
    tol: Option<f64>,
    stride: Option<f64>,
    n_max: Option<u32>,
    output: Option<String>,
}

fn parse_err(location: &str, message: impl Into<String>) -> Error {
    Error::Parse { location: location.to_string(), message: message.into() }
}

impl Draft {
    fn apply(&mut self, key: &str, raw: Raw, loc: &str) -> Result<()> {
        let num = |raw: &Raw| match raw {
            Raw::Num(x) => Ok(*x),
            Raw::Text(t) => parse_number(t).ok_or_else(|| parse_err(loc, format!("`{key}` expects a number, got `{t}`"))),
            Raw::Bool(_) => Err(parse_err(loc, format!("`{key}` expects a number"))),
        };
        match key {
            "mode" => {
                let Raw::Text(t) = &raw else { return Err(parse_err(loc, "`mode` expects text")) };
                self.mode = Some(match t.as_str() {
                    "trace" => Mode::Trace,
                    "sweep" => Mode::Sweep,
                    "compare" => Mode::Compare,
                    "selftest" => Mode::Selftest,
                    other => return Err(parse_err(loc, format!("unknown mode `{other}`"))),
                });
            }
            "output" | "output_path" => {
                let Raw::Text(t) = raw else { return Err(parse_err(loc, "`output` expects text")) };
                self.output = Some(t);
            }
            "zero_sweep" => {
                self.zero_sweep = match &raw {
                    Raw::Bool(b) => *b,
                    Raw::Text(t) if t == "true" => true,
                    Raw::Text(t) if t == "false" => false,
                    _ => return Err(parse_err(loc, "`zero_sweep` expects true or false")),
                };
            }
            "tau_start" => self.window.0 = Some(num(&raw)?),
            "tau_end" => self.window.1 = Some(num(&raw)?),
            "tol" => self.tol = Some(num(&raw)?),
            "stride" => self.stride = Some(num(&raw)?),
            "n_max" => {
                let x = num(&raw)?;
                if !(x >= 1.0 && x.fract() == 0.0 && x <= 100_000.0) {
                    return Err(parse_err(loc, format!("`n_max` expects a positive integer, got {x}")));
                }
                self.n_max = Some(x as u32);
            }
            field => {
                let x = num(&raw)?;
                if !self.phys.set(field, x) {
                    return Err(parse_err(loc, format!("unknown key `{field}`")));
                }
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<RunSpec> {
        let cfg = if self.zero_sweep {
            if self.phys.v != DriveConfig::default().v && self.phys.v != 0.0 {
                return Err(Error::InvalidConfig("zero_sweep = true conflicts with an explicit v".into()));
            }
            self.phys.zero_sweep()
        } else {
            DriveConfig::from_physical(self.phys)?
        };
        cfg.validate()?;
        let mut spec = RunSpec::new(cfg);
        spec.mode = self.mode.unwrap_or(Mode::Trace);
        spec.window = (self.window.0.unwrap_or(DEFAULT_WINDOW.0), self.window.1.unwrap_or(DEFAULT_WINDOW.1));
        spec.tol = self.tol.unwrap_or(DEFAULT_TOL);
        spec.stride = self.stride.unwrap_or(DEFAULT_STRIDE);
        if let Some(n) = self.n_max {
            spec.trunc = TruncationSpec::new(n, &cfg)?;
        }
        spec.output_path = self.output.unwrap_or_default();
        crate::integrate::IntegratorSettings::from_tol(spec.tol)?;
        spec.validate()?;
        Ok(spec)
    }
}

fn json_raw(v: &serde_json::Value, loc: &str) -> Result<Raw> {
    Ok(match v {
        serde_json::Value::Number(n) => Raw::Num(n.as_f64().ok_or_else(|| parse_err(loc, "number out of range"))?),
        serde_json::Value::String(s) => Raw::Text(s.clone()),
        serde_json::Value::Bool(b) => Raw::Bool(*b),
        _ => return Err(parse_err(loc, "expected a number, string or boolean")),
    })
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

/// Iterate the `key = value` lines of a config, with their line numbers.
fn kv_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn split_kv(line: &str, loc: &str) -> Result<(String, String)> {
    let (k, v) = line
        .split_once('=')
        .ok_or_else(|| parse_err(loc, format!("expected `key = value`, got `{line}`")))?;
    let v = v.trim().trim_matches('"');
    Ok((k.trim().to_string(), v.to_string()))
}

/// Parse a run config. Empty input gives the defaults.
pub fn parse_config(text: &str) -> Result<RunSpec> {
    let mut draft = Draft::default();
    if is_json(text) {
        let doc: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(text).map_err(|e| parse_err(&format!("line {}", e.line()), e.to_string()))?;
        for (k, v) in &doc {
            let loc = format!("key `{k}`");
            draft.apply(k, json_raw(v, &loc)?, &loc)?;
        }
    } else {
        for (line, content) in kv_lines(text) {
            let loc = format!("line {line}");
            let (k, v) = split_kv(content, &loc)?;
            draft.apply(&k, Raw::Text(v), &loc)?;
        }
    }
    draft.finish()
}

/// Quantity recorded per sweep cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    PUpFinal,
    PDnFinal,
    UzFinal,
    DeltaParam,
}

impl Observable {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "p_up_final" => Self::PUpFinal,
            "p_dn_final" => Self::PDnFinal,
            "uz_final" => Self::UzFinal,
            "delta_param" => Self::DeltaParam,
            _ => return None,
        })
    }
}

/// One scanned parameter: `steps` evenly spaced values from `min` to `max`.
/// Values are dimensionless (already rescaled).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub field: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| if k + 1 == self.steps { self.max } else { self.min + (self.max - self.min) * k as f64 / last })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if !DriveConfig::FIELDS.contains(&self.field.as_str()) {
            return Err(Error::InvalidConfig(format!("sweep axis `{}` is not a drive field", self.field)));
        }
        if self.steps < 2 {
            return Err(Error::InvalidConfig(format!("sweep axis `{}` needs steps >= 2", self.field)));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidConfig(format!("sweep axis `{}` bounds must be finite", self.field)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    pub observable: Observable,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.axis1.validate()?;
        if let Some(a) = &self.axis2 {
            a.validate()?;
        }
        Ok(())
    }
}

/// Parse a sweep spec: JSON, or lines `axis1 = field min max steps`,
/// optional `axis2 = ...`, and `observable = name`.
pub fn parse_sweep(text: &str) -> Result<SweepSpec> {
    let spec = if is_json(text) {
        serde_json::from_str::<SweepSpec>(text).map_err(|e| parse_err(&format!("line {}", e.line()), e.to_string()))?
    } else {
        let (mut a1, mut a2, mut obs) = (None, None, None);
        for (line, content) in kv_lines(text) {
            let loc = format!("line {line}");
            let (k, v) = split_kv(content, &loc)?;
            match k.as_str() {
                "axis1" | "axis2" => {
                    let parts: Vec<&str> = v.split_whitespace().collect();
                    let [field, min, max, steps] = parts[..] else {
                        return Err(parse_err(&loc, "axis expects `field min max steps`"));
                    };
                    let n = |s: &str| parse_number(s).ok_or_else(|| parse_err(&loc, format!("`{s}` is not a number")));
                    let steps: usize = steps.parse().map_err(|_| parse_err(&loc, format!("`{steps}` is not a step count")))?;
                    let axis = Axis { field: field.to_string(), min: n(min)?, max: n(max)?, steps };
                    if k == "axis1" { a1 = Some(axis) } else { a2 = Some(axis) }
                }
                "observable" => {
                    obs = Some(Observable::parse(&v).ok_or_else(|| parse_err(&loc, format!("unknown observable `{v}`")))?);
                }
                other => return Err(parse_err(&loc, format!("unknown key `{other}`"))),
            }
        }
        SweepSpec {
            axis1: a1.ok_or_else(|| parse_err("sweep", "missing `axis1`"))?,
            axis2: a2,
            observable: obs.unwrap_or(Observable::PUpFinal),
        }
    };
    spec.validate()?;
    Ok(spec)
}

/// Shortest round-trip representation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Integrate the Schrödinger equation and render `tau,p_up,p_dn,ux,uy,uz`.
pub fn run_trace(spec: &RunSpec) -> Result<String> {
    spec.validate()?;
    let tr = propagate_tdse(&spec.cfg, SpinState::up(), spec.window.0, spec.window.1, spec.tol, spec.stride)?;
    let mut out = String::from("tau,p_up,p_dn,ux,uy,uz\n");
    for (t, s) in &tr.samples {
        let n = s.norm_sqr();
        let (up, dn) = (s.c_up.norm_sqr() / n, s.c_dn.norm_sqr() / n);
        let u = s.to_bloch();
        let row = [*t, up, dn, u.ux, u.uy, u.uz].map(fmt_f64).join(",");
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}

fn cell_value(spec: &RunSpec, cfg: &DriveConfig, obs: Observable) -> Result<f64> {
    cfg.validate()?;
    if obs == Observable::DeltaParam {
        return analytic::strong_drive_delta(cfg);
    }
    let (a, b) = spec.window;
    let tr = propagate_tdse(cfg, SpinState::up(), a, b, spec.tol, b - a)?;
    let s = tr.last().1;
    let n = s.norm_sqr();
    let (up, dn) = (s.c_up.norm_sqr() / n, s.c_dn.norm_sqr() / n);
    Ok(match obs {
        Observable::PUpFinal => up,
        Observable::PDnFinal => dn,
        _ => up - dn,
    })
}

fn error_marker(e: &Error) -> String {
    let msg: String = e.to_string().chars().map(|c| if c == ',' || c == '\n' { ';' } else { c }).collect();
    format!("ERR({msg})")
}

/// Evaluate the observable on the grid with `workers` threads. Rows come out
/// in row-major order (`axis1` outer) whatever the worker count; failed cells
/// carry an `ERR(...)` marker and do not stop the grid.
pub fn run_sweep(spec: &RunSpec, sweep: &SweepSpec, workers: usize) -> Result<String> {
    spec.validate()?;
    sweep.validate()?;
    if workers == 0 {
        return Err(Error::InvalidConfig("workers must be >= 1".into()));
    }
    let v1 = sweep.axis1.values();
    let v2: Vec<Option<f64>> = match &sweep.axis2 {
        Some(a) => a.values().into_iter().map(Some).collect(),
        None => vec![None],
    };
    let cells: Vec<(f64, Option<f64>)> = v1.iter().flat_map(|&x| v2.iter().map(move |&y| (x, y))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start {workers} workers: {e}")))?;
    let values: Vec<Result<f64>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(x, y)| {
                let mut cfg = spec.cfg;
                cfg.set(&sweep.axis1.field, x);
                if let (Some(a), Some(y)) = (&sweep.axis2, y) {
                    cfg.set(&a.field, y);
                }
                cell_value(spec, &cfg, sweep.observable)
            })
            .collect()
    });
    let mut out = String::from("axis1,axis2,observable\n");
    for ((x, y), v) in cells.iter().zip(&values) {
        let y = y.map(fmt_f64).unwrap_or_default();
        let v = match v {
            Ok(v) => fmt_f64(*v),
            Err(e) => error_marker(e),
        };
        let _ = writeln!(out, "{},{},{}", fmt_f64(*x), y, v);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    StrongDrive,
    WeakDrive,
    BlochPert,
    Rabi,
    InverseLz,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "strong_drive" => Self::StrongDrive,
            "weak_drive" => Self::WeakDrive,
            "bloch_pert" => Self::BlochPert,
            "rabi" => Self::Rabi,
            "inverse_lz" => Self::InverseLz,
            other => return Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparePoint {
    pub tau: f64,
    pub quantity: String,
    pub analytic: f64,
    pub numeric: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub method: Method,
    pub threshold: f64,
    pub samples: Vec<ComparePoint>,
    pub max_abs_dev: f64,
    pub rms_dev: f64,
    pub pass: bool,
    pub warnings: Vec<String>,
}

impl CompareReport {
    fn build(method: Method, threshold: f64, raw: Vec<(f64, &str, f64, f64)>, warnings: Vec<String>) -> Self {
        let samples: Vec<ComparePoint> = raw
            .into_iter()
            .map(|(tau, q, a, n)| ComparePoint { tau, quantity: q.to_string(), analytic: a, numeric: n, deviation: (a - n).abs() })
            .collect();
        let max_abs_dev = samples.iter().map(|p| p.deviation).fold(0.0, f64::max);
        let rms_dev = if samples.is_empty() {
            0.0
        } else {
            (samples.iter().map(|p| p.deviation * p.deviation).sum::<f64>() / samples.len() as f64).sqrt()
        };
        Self { method, threshold, samples, max_abs_dev, rms_dev, pass: max_abs_dev <= threshold, warnings }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }
}

fn final_populations(spec: &RunSpec) -> Result<(f64, f64, f64)> {
    let (a, b) = spec.window;
    let tr = propagate_tdse(&spec.cfg, SpinState::up(), a, b, spec.tol, b - a)?;
    let (t, s) = tr.last();
    let n = s.norm_sqr();
    Ok((t, s.c_up.norm_sqr() / n, s.c_dn.norm_sqr() / n))
}

/// Zero-sweep cases start at `t = 0`; sample up to the end of the window.
fn zero_sweep_times(spec: &RunSpec) -> Result<Vec<f64>> {
    let end = spec.window.1;
    if !(end > 0.0) {
        return Err(Error::InvalidConfig(format!("zero-sweep comparisons run from t = 0 and need tau_end > 0, got {end}")));
    }
    Ok(sample_times(0.0, end, spec.stride))
}

fn zero_sweep_compare(
    spec: &RunSpec,
    formula: impl Fn(&DriveConfig, f64) -> Result<(f64, f64)>,
) -> Result<Vec<(f64, &'static str, f64, f64)>> {
    let times = zero_sweep_times(spec)?;
    formula(&spec.cfg, times[0])?;
    let tr = propagate_tdse(&spec.cfg, SpinState::up(), 0.0, spec.window.1, spec.tol, spec.stride)?;
    let mut raw = Vec::with_capacity(tr.len());
    for (t, s) in &tr.samples {
        let (_, dn) = formula(&spec.cfg, *t)?;
        raw.push((*t, "p_dn", dn, s.c_dn.norm_sqr() / s.norm_sqr()));
    }
    Ok(raw)
}

/// Compare a closed-form result with the numerical solution. The numeric side
/// always comes from [`crate::integrate`].
pub fn run_compare(spec: &RunSpec, method: Method, threshold: f64) -> Result<CompareReport> {
    spec.validate()?;
    if !(threshold >= 0.0) {
        return Err(Error::InvalidConfig(format!("threshold must be >= 0, got {threshold}")));
    }
    let cfg = &spec.cfg;
    let mut warnings = Vec::new();
    let raw = match method {
        Method::StrongDrive => {
            let p = analytic::strong_drive_survival(cfg)?;
            if cfg.eps0.abs() > cfg.freq_rf / 2.0 {
                warnings.push(format!(
                    "|eps0| = {} exceeds freq_rf / 2 = {}; the strong-drive result degrades for large static detuning",
                    cfg.eps0.abs(),
                    cfg.freq_rf / 2.0
                ));
            }
            let (t, up, _) = final_populations(spec)?;
            vec![(t, "p_up", p, up)]
        }
        Method::WeakDrive => {
            let (p, _) = analytic::weak_drive_probabilities(cfg)?;
            let (t, up, _) = final_populations(spec)?;
            vec![(t, "p_up", p, up)]
        }
        Method::BlochPert => {
            let pert = Perturbative::new(cfg, spec.trunc)?;
            let (a, b) = spec.window;
            let tr = propagate_bloch(cfg, BlochVector::north(), a, b, spec.tol, spec.stride)?;
            let mut raw = Vec::with_capacity(3 * tr.len());
            for (t, u) in &tr.samples {
                let q = pert.at(*t);
                raw.push((*t, "ux", q.ux, u.ux));
                raw.push((*t, "uy", q.uy, u.uy));
                raw.push((*t, "uz", q.uz, u.uz));
            }
            raw
        }
        Method::Rabi => zero_sweep_compare(spec, analytic::rabi_case)?,
        Method::InverseLz => zero_sweep_compare(spec, analytic::inverse_lz_case)?,
    };
    Ok(CompareReport::build(method, threshold, raw, warnings))
}
