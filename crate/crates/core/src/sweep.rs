//! Parameter sweeps over pulse area, chirp, hole width and bath temperature.
//!
//! Points are independent propagations run on a work-stealing pool and
//! gathered by index, so the result does not depend on the number of workers.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::dynamics;
use crate::error::{Error, Result};
use crate::grid::SimGrid;
use crate::shaper;

pub const DEFAULT_BUDGET: usize = 100_000;
pub const MAX_AXES: usize = 3;
/// Significant digits of numbers written to CSV.
pub const CSV_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    /// Pulse area, stored in units of π.
    Area,
    /// Spectral chirp φ″ (ps²).
    Chirp,
    /// Hole full width 2δ (meV).
    Hole,
    /// Bath temperature (K).
    Temperature,
}

impl AxisKind {
    fn apply(self, cfg: &mut Config, value: f64) {
        match self {
            AxisKind::Area => cfg.pulse.area_pi = value,
            AxisKind::Chirp => cfg.pulse.chirp_ps2 = value,
            AxisKind::Hole => cfg.mask.hole_fwhm_mev = value,
            AxisKind::Temperature => cfg.phonon.temperature_k = value,
        }
    }
}

impl FromStr for AxisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "area" | "theta" => Ok(AxisKind::Area),
            "chirp" => Ok(AxisKind::Chirp),
            "hole" => Ok(AxisKind::Hole),
            "temperature" | "temp" => Ok(AxisKind::Temperature),
            other => Err(Error::Config(format!(
                "unknown axis `{other}` (expected area, chirp, hole or temperature)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub kind: AxisKind,
    pub values: Vec<f64>,
}

fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Config(format!("cannot parse axis value `{s}`"));
    let v = match s.strip_suffix("pi") {
        Some("") => PI,
        Some("-") => -PI,
        Some(m) => m.trim().parse::<f64>().map_err(|_| bad())? * PI,
        None => s.parse::<f64>().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

impl Axis {
    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(kind: AxisKind, start: f64, stop: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Config("axis count must be >= 1".into()));
        }
        let values = if count == 1 {
            vec![start]
        } else {
            let step = (stop - start) / (count - 1) as f64;
            (0..count).map(|i| start + step * i as f64).collect()
        };
        Ok(Self { kind, values })
    }

    pub fn list(kind: AxisKind, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("axis needs at least one value".into()));
        }
        Ok(Self { kind, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Parses `name=start:stop:count` or `name=v1,v2,...`. A value with a `pi`
/// suffix is multiplied by π. Area values are angles in radians and are
/// stored in units of π, so `area=0:6pi:61` spans θ = 0 … 6π.
impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, spec) = s
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("axis `{s}` must look like name=values")))?;
        let kind: AxisKind = name.parse()?;
        let scale = if kind == AxisKind::Area { 1.0 / PI } else { 1.0 };
        let parts: Vec<&str> = spec.split(':').collect();
        let axis = match parts.as_slice() {
            [start, stop, count] => {
                let count: usize = count
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("axis count `{count}` is not an integer")))?;
                Axis::linspace(kind, parse_number(start)?, parse_number(stop)?, count)?
            }
            [list] => Axis::list(
                kind,
                list.split(',').map(parse_number).collect::<Result<Vec<_>>>()?,
            )?,
            _ => {
                return Err(Error::Config(format!(
                    "axis `{s}`: use start:stop:count or a comma-separated list"
                )))
            }
        };
        Ok(Axis {
            kind,
            values: axis.values.into_iter().map(|v| v * scale).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub base: Config,
    pub axes: Vec<Axis>,
    /// Run every point both with and without phonons. Otherwise the base
    /// configuration's `phonon.enabled` decides.
    pub phonon_toggle: bool,
    /// Upper bound on the number of propagations.
    pub budget: usize,
}

impl SweepConfig {
    pub fn new(base: Config, axes: Vec<Axis>) -> Self {
        Self {
            base,
            axes,
            phonon_toggle: false,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_phonon_toggle(mut self, on: bool) -> Self {
        self.phonon_toggle = on;
        self
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    pub fn n_points(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    fn phonon_settings(&self) -> Vec<bool> {
        if self.phonon_toggle {
            vec![false, true]
        } else {
            vec![self.base.phonon.enabled]
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.axes.len() > MAX_AXES {
            return Err(Error::Config(format!("at most {MAX_AXES} axes (got {})", self.axes.len())));
        }
        for (i, a) in self.axes.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::Config(format!("axis {:?} is empty", a.kind)));
            }
            if self.axes[..i].iter().any(|b| b.kind == a.kind) {
                return Err(Error::Config(format!("axis {:?} given twice", a.kind)));
            }
        }
        let total = self.n_points().saturating_mul(self.phonon_settings().len());
        if total > self.budget {
            return Err(Error::Config(format!(
                "sweep needs {total} propagations, budget is {}",
                self.budget
            )));
        }
        Ok(())
    }

    /// Axis values of the point with flat index `index` (first axis slowest).
    pub fn coordinates(&self, mut index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            out[k] = axis.values[index % axis.len()];
            index /= axis.len();
        }
        out
    }

    /// Configuration of one point.
    pub fn point_config(&self, index: usize, phonons: bool) -> Config {
        let mut cfg = self.base;
        for (axis, v) in self.axes.iter().zip(self.coordinates(index)) {
            axis.kind.apply(&mut cfg, v);
        }
        cfg.phonon.enabled = phonons;
        cfg
    }

    /// SHA-256 of the canonical JSON form of the sweep.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("sweep config always serializes");
        Sha256::digest(&json)
            .iter()
            .fold(String::with_capacity(64), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            })
    }
}

/// Final occupation of a single configuration.
pub fn run_point(cfg: &Config) -> Result<f64> {
    cfg.validate()?;
    let pulse = cfg.pulse_spec();
    let emitter = cfg.emitter_config();
    let grid = SimGrid::sized_for(&pulse, cfg.grid_options())?;
    let field = shaper::synthesize(&pulse, &emitter, &grid)?;
    Ok(dynamics::final_state(&field, &emitter, &cfg.solver_params())?.occupation())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub index: usize,
    pub message: String,
}

/// Occupations for one phonon setting, flat in row-major axis order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRun {
    pub phonons: bool,
    pub occupation: Vec<Option<f64>>,
    pub failures: Vec<PointFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub config_hash: String,
    pub code_version: String,
    /// Seconds since the Unix epoch, if requested.
    pub timestamp: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub shape: Vec<usize>,
    pub runs: Vec<SweepRun>,
    pub metadata: Metadata,
}

/// Timestamp from `SOURCE_DATE_EPOCH`, if set; keeps output reproducible.
pub fn reproducible_timestamp() -> Option<u64> {
    std::env::var("SOURCE_DATE_EPOCH").ok()?.trim().parse().ok()
}

/// Runs every point on `jobs` workers (0 = one per core). Failing points are
/// recorded and leave a gap in the occupation tensor.
pub fn run_sweep(config: &SweepConfig, jobs: usize) -> Result<SweepResult> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let n = config.n_points();
    let settings = config.phonon_settings();
    let tasks: Vec<(usize, bool)> = settings
        .iter()
        .flat_map(|&ph| (0..n).map(move |i| (i, ph)))
        .collect();
    let outcomes: Vec<Result<f64>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(i, ph)| run_point(&config.point_config(i, ph)))
            .collect()
    });
    let runs = settings
        .iter()
        .zip(outcomes.chunks(n.max(1)))
        .map(|(&phonons, chunk)| {
            let mut failures = Vec::new();
            let occupation = chunk
                .iter()
                .enumerate()
                .map(|(index, r)| match r {
                    Ok(v) => Some(*v),
                    Err(e) => {
                        failures.push(PointFailure {
                            index,
                            message: e.to_string(),
                        });
                        None
                    }
                })
                .collect();
            SweepRun {
                phonons,
                occupation,
                failures,
            }
        })
        .collect();
    Ok(SweepResult {
        shape: config.shape(),
        runs,
        metadata: Metadata {
            config_hash: config.hash(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: reproducible_timestamp(),
        },
        config: config.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

/// `x` with `digits` significant digits, in the style of C's `%g`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

impl SweepResult {
    /// Long-form table: one row per point and phonon setting. Columns not
    /// swept report the base configuration's value.
    pub fn to_csv(&self) -> String {
        let f = |x: f64| format_significant(x, CSV_DIGITS);
        let mut out = String::from("theta_pi,chirp_ps2,hole_mev,temp_k,phonons,occupation\n");
        let n = self.config.n_points();
        for i in 0..n {
            for run in &self.runs {
                let c = self.config.point_config(i, run.phonons);
                let occ = run.occupation[i].map_or_else(|| "nan".to_string(), f);
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    f(c.pulse.area_pi),
                    f(c.pulse.chirp_ps2),
                    f(c.mask.hole_fwhm_mev),
                    f(c.phonon.temperature_k),
                    u8::from(run.phonons),
                    occ
                );
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result always serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Writes `result` to `path` in the requested format.
pub fn emit_results(result: &SweepResult, format: Format, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, result.render(format)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_results(path: impl AsRef<Path>) -> Result<SweepResult> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    SweepResult::from_json(&text)
}
