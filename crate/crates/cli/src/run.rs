//! Evaluation of every grid point of a run.

use casimir_core::parallel::map_indexed;
use casimir_core::{
    evaluate, FrictionReport, GeometrySpec, SpectralPolarizability, ThermalState, Tolerance,
};

use crate::config::{RunConfig, SweepParameter};

/// One grid point: the swept value (if any) and its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub parameter: Option<f64>,
    pub outcome: Result<FrictionReport, String>,
}

impl ResultRow {
    pub fn is_ok(&self) -> bool {
        self.outcome.is_ok()
    }
}

fn point(cfg: &RunConfig, param: Option<(SweepParameter, f64)>) -> casimir_core::Result<FrictionReport> {
    let mut geometry = cfg.geometry;
    let [mut s1, mut s2]: [SpectralPolarizability; 2] = cfg.spectra.clone();
    let mut thermal = cfg.thermal;
    if let Some((p, x)) = param {
        match (p, &mut geometry) {
            (SweepParameter::Beta, _) => thermal = ThermalState::new(x)?,
            (SweepParameter::R, GeometrySpec::Pair { r, .. }) => *r = r.with_norm(x)?,
            (SweepParameter::Z0, GeometrySpec::ParticlePlane { half, .. }) => *half = half.with_z0(x)?,
            (SweepParameter::D, GeometrySpec::Slabs { pair, .. }) => *pair = pair.with_d(x)?,
            (SweepParameter::Gamma, _) => {
                s1 = s1.with_width(x)?;
                s2 = s2.with_width(x)?;
            }
            (SweepParameter::Detuning, _) => s2 = s2.shifted(x)?,
            _ => unreachable!("sweep parameter validated against the geometry"),
        }
    }
    evaluate(&geometry, &s1, &s2, &thermal, Tolerance::relative(cfg.tolerance))
}

/// Evaluates all grid points, concurrently when the `parallel` feature of
/// the core crate is on. Rows come back in grid order.
pub fn run(cfg: &RunConfig) -> Vec<ResultRow> {
    match &cfg.sweep {
        None => vec![ResultRow {
            parameter: None,
            outcome: point(cfg, None).map_err(|e| e.to_string()),
        }],
        Some(s) => map_indexed(s.grid.len(), |i| {
            let x = s.grid[i];
            ResultRow {
                parameter: Some(x),
                outcome: point(cfg, Some((s.parameter, x))).map_err(|e| e.to_string()),
            }
        }),
    }
}
