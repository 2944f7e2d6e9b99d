//! CSV and JSON rendering of result rows.

use std::path::Path;

use casimir_core::ForceValue;
use serde_json::{json, Value};

use crate::config::{Command, Format, RunConfig};
use crate::run::ResultRow;
use crate::CliError;

pub const UNITS_HEADER: &str = "# units: hbar=kB=1";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn force_columns(command: Command) -> (&'static [&'static str], &'static [&'static str]) {
    match command {
        Command::Pair => (&["force_x", "force_y", "force_z"], &["kernel_x", "kernel_y", "kernel_z"]),
        Command::ParticlePlane => (&["force"], &["kernel_factor"]),
        Command::Slabs => (&["force_per_area"], &["kernel_factor"]),
    }
}

fn header(cfg: &RunConfig) -> Vec<String> {
    let (force, kernel) = force_columns(cfg.command);
    let mut h = Vec::new();
    if let Some(s) = &cfg.sweep {
        h.push(s.parameter.name().to_string());
    }
    h.extend(force.iter().chain(kernel).map(|s| s.to_string()));
    h.extend(["spectral_factor", "spectral_error", "mode", "status"].map(String::from));
    h
}

fn csv_record(cfg: &RunConfig, row: &ResultRow) -> Vec<String> {
    let (force, kernel) = force_columns(cfg.command);
    let mut rec = Vec::new();
    if let Some(x) = row.parameter {
        rec.push(num(x));
    }
    match &row.outcome {
        Ok(r) => {
            match &r.force {
                Some(f) => rec.extend(f.components().into_iter().map(num)),
                None => rec.extend(force.iter().map(|_| String::new())),
            }
            rec.extend(r.kernel_factor.components().into_iter().map(num));
            rec.push(num(r.spectral_factor.value));
            rec.push(num(r.spectral_factor.error));
            rec.push(r.mode.as_str().to_string());
            rec.push("ok".to_string());
        }
        Err(e) => {
            rec.extend((0..force.len() + kernel.len() + 3).map(|_| String::new()));
            rec.push(format!("error: {e}"));
        }
    }
    rec
}

fn force_json(f: &ForceValue) -> Value {
    match *f {
        ForceValue::Vector(v) => json!(v),
        ForceValue::Scalar(s) => json!(s),
    }
}

fn json_row(cfg: &RunConfig, row: &ResultRow) -> Value {
    let mut obj = serde_json::Map::new();
    if let (Some(s), Some(x)) = (&cfg.sweep, row.parameter) {
        obj.insert(s.parameter.name().into(), json!(x));
    }
    let (force_key, kernel_key) = match cfg.command {
        Command::Pair => ("force", "kernel"),
        Command::ParticlePlane => ("force", "kernel_factor"),
        Command::Slabs => ("force_per_area", "kernel_factor"),
    };
    match &row.outcome {
        Ok(r) => {
            obj.insert(force_key.into(), r.force.as_ref().map_or(Value::Null, force_json));
            obj.insert(kernel_key.into(), force_json(&r.kernel_factor));
            obj.insert("spectral_factor".into(), json!(r.spectral_factor.value));
            obj.insert("spectral_error".into(), json!(r.spectral_factor.error));
            obj.insert("mode".into(), json!(r.mode.as_str()));
            obj.insert("status".into(), json!("ok"));
        }
        Err(e) => {
            for k in [force_key, kernel_key, "spectral_factor", "spectral_error", "mode"] {
                obj.insert(k.into(), Value::Null);
            }
            obj.insert("status".into(), json!(format!("error: {e}")));
        }
    }
    Value::Object(obj)
}

/// Renders rows in the requested format. An empty row set is an error.
pub fn render(cfg: &RunConfig, rows: &[ResultRow], format: Format) -> Result<String, CliError> {
    if rows.is_empty() {
        return Err(CliError::Numerical("no result rows to emit".into()));
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Io(e.to_string());
            w.write_record(header(cfg)).map_err(io)?;
            for row in rows {
                w.write_record(csv_record(cfg, row)).map_err(io)?;
            }
            let body = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
            let body = String::from_utf8(body).map_err(|e| CliError::Io(e.to_string()))?;
            Ok(format!("{UNITS_HEADER}\n{body}"))
        }
        Format::Json => {
            let doc = Value::Array(rows.iter().map(|r| json_row(cfg, r)).collect());
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Writes to `path`, or stdout when `None`.
pub fn write_output(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}
