//! JSON run configuration.
//!
//! ```text
//! {
//!   "geometry": { "d": 1.0, "density1": 1.0, "density2": 1.0, "v": 1.0 },
//!   "spectra": [
//!     { "lines": [{ "weight": 1.0, "center": 1.0, "width": 0.01 }] },
//!     { "table": "spectrum.csv" }
//!   ],
//!   "thermal": { "beta": 1.0 },
//!   "sweep": { "parameter": "d", "grid": { "log_range": { "start": 1, "stop": 10, "points": 11 } } },
//!   "tolerance": 1e-8,
//!   "output": { "format": "csv", "path": "out.csv" }
//! }
//! ```
//!
//! The geometry block depends on the subcommand: `pair` takes `r` and `v`
//! (3-vectors), `particle-plane` takes `z0`, `density`, `v`, and `slabs`
//! takes `d`, `density1`, `density2`, `v`. Unknown keys are rejected and
//! every diagnostic names the offending field.

use std::path::{Path, PathBuf};

use casimir_core::spectral::{SpectralLine, TabulatedSpectrum};
use casimir_core::{
    GeometrySpec, HalfSpaceSpec, SeparationVector, SlabPairSpec, SpectralPolarizability,
    ThermalState,
};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Pair,
    ParticlePlane,
    Slabs,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Pair => "pair",
            Command::ParticlePlane => "particle-plane",
            Command::Slabs => "slabs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    Beta,
    Z0,
    D,
    R,
    Gamma,
    Detuning,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            Self::Beta => "beta",
            Self::Z0 => "z0",
            Self::D => "d",
            Self::R => "r",
            Self::Gamma => "gamma",
            Self::Detuning => "detuning",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub geometry: GeometrySpec,
    pub spectra: [SpectralPolarizability; 2],
    pub thermal: ThermalState,
    pub sweep: Option<Sweep>,
    pub tolerance: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    geometry: serde_json::Value,
    spectra: Vec<RawSpectrum>,
    thermal: RawThermal,
    #[serde(default)]
    sweep: Option<RawSweep>,
    #[serde(default)]
    tolerance: Option<f64>,
    #[serde(default)]
    output: Option<RawOutput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThermal {
    beta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectrum {
    #[serde(default)]
    lines: Option<Vec<RawLine>>,
    #[serde(default)]
    table: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLine {
    weight: f64,
    center: f64,
    #[serde(default)]
    width: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    parameter: SweepParameter,
    grid: RawGrid,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum RawGrid {
    List(Vec<f64>),
    LogRange { start: f64, stop: f64, points: usize },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(default)]
    format: Option<Format>,
    #[serde(default)]
    path: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairGeometry {
    r: [f64; 3],
    v: [f64; 3],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlaneGeometry {
    z0: f64,
    density: f64,
    v: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SlabGeometry {
    d: f64,
    density1: f64,
    density2: f64,
    v: f64,
}

fn field_error(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{path}: {msg}"))
}

fn deserialize<T: DeserializeOwned>(value: serde_json::Value, prefix: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner.as_str()) {
            (true, _) => inner.clone(),
            (false, ".") => prefix.to_string(),
            (false, _) => format!("{prefix}.{inner}"),
        };
        let path = if path.is_empty() || path == "." { "(root)".to_string() } else { path };
        field_error(&path, e.into_inner())
    })
}

fn require(path: &str, ok: bool, rule: &str, value: f64) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(field_error(path, format!("{rule}, got {value}")))
    }
}

fn positive(path: &str, x: f64) -> Result<f64, CliError> {
    require(path, x.is_finite() && x > 0.0, "must be > 0", x)?;
    Ok(x)
}

fn nonnegative(path: &str, x: f64) -> Result<f64, CliError> {
    require(path, x.is_finite() && x >= 0.0, "must be >= 0", x)?;
    Ok(x)
}

fn finite(path: &str, x: f64) -> Result<f64, CliError> {
    require(path, x.is_finite(), "must be finite", x)?;
    Ok(x)
}

fn parse_geometry(command: Command, value: serde_json::Value) -> Result<GeometrySpec, CliError> {
    match command {
        Command::Pair => {
            let g: PairGeometry = deserialize(value, "geometry")?;
            for (i, &x) in g.r.iter().enumerate() {
                finite(&format!("geometry.r[{i}]"), x)?;
            }
            for (i, &x) in g.v.iter().enumerate() {
                finite(&format!("geometry.v[{i}]"), x)?;
            }
            let r = SeparationVector::new(g.r).map_err(|e| field_error("geometry.r", e))?;
            Ok(GeometrySpec::Pair { r, v: g.v })
        }
        Command::ParticlePlane => {
            let g: PlaneGeometry = deserialize(value, "geometry")?;
            positive("geometry.z0", g.z0)?;
            nonnegative("geometry.density", g.density)?;
            finite("geometry.v", g.v)?;
            let half = HalfSpaceSpec::new(g.z0, g.density).map_err(|e| field_error("geometry", e))?;
            Ok(GeometrySpec::ParticlePlane { half, v: g.v })
        }
        Command::Slabs => {
            let g: SlabGeometry = deserialize(value, "geometry")?;
            positive("geometry.d", g.d)?;
            nonnegative("geometry.density1", g.density1)?;
            nonnegative("geometry.density2", g.density2)?;
            finite("geometry.v", g.v)?;
            let pair = SlabPairSpec::new(g.d, g.density1, g.density2)
                .map_err(|e| field_error("geometry", e))?;
            Ok(GeometrySpec::Slabs { pair, v: g.v })
        }
    }
}

fn parse_spectrum(i: usize, raw: RawSpectrum, base: &Path) -> Result<SpectralPolarizability, CliError> {
    let path = format!("spectra[{i}]");
    match (raw.lines, raw.table) {
        (Some(lines), None) => {
            if lines.is_empty() {
                return Err(field_error(&format!("{path}.lines"), "need at least one line"));
            }
            let mut out = Vec::with_capacity(lines.len());
            for (j, l) in lines.iter().enumerate() {
                let p = format!("{path}.lines[{j}]");
                nonnegative(&format!("{p}.weight"), l.weight)?;
                positive(&format!("{p}.center"), l.center)?;
                nonnegative(&format!("{p}.width"), l.width)?;
                out.push(SpectralLine::new(l.weight, l.center, l.width).map_err(|e| field_error(&p, e))?);
            }
            SpectralPolarizability::lines(out).map_err(|e| field_error(&path, e))
        }
        (None, Some(table)) => {
            let p = format!("{path}.table");
            let file = if table.is_absolute() { table } else { base.join(table) };
            let text = std::fs::read_to_string(&file)
                .map_err(|e| field_error(&p, format!("cannot read {}: {e}", file.display())))?;
            let t = TabulatedSpectrum::parse(&text)
                .map_err(|e| field_error(&p, format!("{}: {e}", file.display())))?;
            Ok(SpectralPolarizability::Tabulated(t))
        }
        _ => Err(field_error(&path, "exactly one of `lines` or `table` is required")),
    }
}

/// Geometric grid with both endpoints reproduced exactly.
pub fn log_range(start: f64, stop: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(start.is_finite() && stop.is_finite() && start > 0.0 && stop > 0.0) {
        return Err(format!("start and stop must be > 0, got {start} and {stop}"));
    }
    if start == stop {
        return Err("start and stop must differ".into());
    }
    if points < 2 {
        return Err(format!("need at least 2 points, got {points}"));
    }
    let (a, b) = (start.ln(), stop.ln());
    let last = points - 1;
    Ok((0..points)
        .map(|i| match i {
            0 => start,
            _ if i == last => stop,
            _ => (a + (b - a) * i as f64 / last as f64).exp(),
        })
        .collect())
}

fn strictly_monotone(grid: &[f64]) -> bool {
    grid.windows(2).all(|w| w[1] > w[0]) || grid.windows(2).all(|w| w[1] < w[0])
}

fn parse_sweep(
    raw: RawSweep,
    command: Command,
    spectra: &[SpectralPolarizability; 2],
) -> Result<Sweep, CliError> {
    let grid = match raw.grid {
        RawGrid::List(v) => v,
        RawGrid::LogRange { start, stop, points } => {
            log_range(start, stop, points).map_err(|e| field_error("sweep.grid.log_range", e))?
        }
    };
    if grid.is_empty() {
        return Err(field_error("sweep.grid", "grid is empty"));
    }
    if !strictly_monotone(&grid) {
        return Err(field_error("sweep.grid", "grid must be strictly monotone"));
    }
    let p = raw.parameter;
    let allowed = match p {
        SweepParameter::Z0 => command == Command::ParticlePlane,
        SweepParameter::D => command == Command::Slabs,
        SweepParameter::R => command == Command::Pair,
        _ => true,
    };
    if !allowed {
        return Err(field_error(
            "sweep.parameter",
            format!("`{}` cannot be swept for `{}`", p.name(), command.name()),
        ));
    }
    for (i, &x) in grid.iter().enumerate() {
        let path = format!("sweep.grid[{i}]");
        match p {
            SweepParameter::Gamma => nonnegative(&path, x).map(|_| ())?,
            SweepParameter::Detuning => finite(&path, x).map(|_| ())?,
            _ => positive(&path, x).map(|_| ())?,
        }
    }
    match p {
        SweepParameter::Gamma => {
            for (i, s) in spectra.iter().enumerate() {
                if matches!(s, SpectralPolarizability::Tabulated(_)) {
                    return Err(field_error(
                        &format!("spectra[{i}]"),
                        "tabulated spectra cannot be swept over gamma",
                    ));
                }
            }
        }
        SweepParameter::Detuning => {
            for (i, &x) in grid.iter().enumerate() {
                spectra[1]
                    .shifted(x)
                    .map_err(|e| field_error(&format!("sweep.grid[{i}]"), format!("detuning of spectra[1]: {e}")))?;
            }
        }
        _ => {}
    }
    Ok(Sweep { parameter: p, grid })
}

/// Parses and validates a configuration. Relative table paths resolve
/// against `base`.
pub fn parse_config(text: &str, command: Command, base: &Path) -> Result<RunConfig, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed JSON: {e}")))?;
    let raw: RawConfig = deserialize(value, "")?;
    let geometry = parse_geometry(command, raw.geometry)?;
    if raw.spectra.len() != 2 {
        return Err(field_error(
            "spectra",
            format!("exactly two spectra are required, got {}", raw.spectra.len()),
        ));
    }
    let mut it = raw.spectra.into_iter();
    let s0 = parse_spectrum(0, it.next().unwrap(), base)?;
    let s1 = parse_spectrum(1, it.next().unwrap(), base)?;
    let spectra = [s0, s1];
    let beta = positive("thermal.beta", raw.thermal.beta)?;
    let thermal = ThermalState::new(beta).map_err(|e| field_error("thermal.beta", e))?;
    let tolerance = match raw.tolerance {
        Some(t) => {
            require("tolerance", t.is_finite() && t > 0.0 && t < 1.0, "must lie in (0, 1)", t)?;
            t
        }
        None => DEFAULT_TOLERANCE,
    };
    let sweep = raw
        .sweep
        .map(|s| parse_sweep(s, command, &spectra))
        .transpose()?;
    let (format, output) = match raw.output {
        Some(o) => (o.format.unwrap_or(Format::Csv), o.path),
        None => (Format::Csv, None),
    };
    Ok(RunConfig {
        command,
        geometry,
        spectra,
        thermal,
        sweep,
        tolerance,
        format,
        output,
    })
}
