use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{csv_error, csv_writer, finish, format_f64, json_error};
use crate::quantum::eigen::{Level, Spectrum};
use crate::quantum::operator::ReducedOperator;
use crate::quantum::problem::{Axis, Boundary, Sector, SpectralProblem};

/// Grid description echoed into the spectrum artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSummary {
    pub sector: Sector,
    pub axes: Vec<Axis>,
    pub steps: Vec<f64>,
    /// Retained nodes after the chamber mask.
    pub nodes: usize,
    pub unknowns: usize,
}

/// Spectrum artifact: the problem echo plus eigenvalues and solver diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumReport {
    pub problem: SpectralProblem,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub levels: Vec<Level>,
    pub gram_residual: f64,
    pub spectral_radius: f64,
    pub grid: GridSummary,
    pub boundary: Boundary,
}

impl SpectrumReport {
    pub fn new(problem: &SpectralProblem, op: &ReducedOperator, spectrum: &Spectrum, level_tol: f64) -> Self {
        Self {
            problem: problem.clone(),
            eigenvalues: spectrum.eigenvalues.clone(),
            residuals: spectrum.residuals.clone(),
            levels: spectrum.levels(level_tol),
            gram_residual: spectrum.gram_residual,
            spectral_radius: spectrum.spectral_radius,
            grid: GridSummary {
                sector: op.grid.sector,
                axes: op.grid.axes.clone(),
                steps: op.grid.steps.clone(),
                nodes: op.grid.len(),
                unknowns: op.dim(),
            },
            boundary: op.grid.boundary,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(json_error)
    }

    /// Parses and checks internal consistency (not the physics).
    pub fn from_json(text: &str) -> Result<Self> {
        let r: SpectrumReport = serde_json::from_str(text).map_err(json_error)?;
        if r.residuals.len() != r.eigenvalues.len() {
            return Err(Error::Parse("eigenvalues and residuals differ in length".into()));
        }
        if r.eigenvalues.iter().chain(&r.residuals).any(|v| !v.is_finite()) {
            return Err(Error::Parse("eigenvalues and residuals must be finite".into()));
        }
        if r.eigenvalues.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Parse("eigenvalues must be ascending".into()));
        }
        if r.levels.iter().map(|l| l.multiplicity).sum::<usize>() != r.eigenvalues.len() {
            return Err(Error::Parse("level multiplicities do not add up to the eigenvalue count".into()));
        }
        if r.grid.axes.len() != r.grid.steps.len() {
            return Err(Error::Parse("grid axes and steps differ in length".into()));
        }
        Ok(r)
    }
}

/// Eigenvector dump: `level,node,m,k,re,im`, one row per amplitude entry `f[m][k]` at each node.
pub fn eigenvectors_to_csv(op: &ReducedOperator, spectrum: &Spectrum) -> Result<String> {
    let vectors = spectrum
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::Domain("spectrum carries no eigenvectors".into()))?;
    let mut w = csv_writer();
    w.write_record(["level", "node", "m", "k", "re", "im"]).map_err(csv_error)?;
    for level in 0..vectors.ncols() {
        let column: Vec<f64> = vectors.column(level).iter().copied().collect();
        for (node, f) in op.amplitudes(&column)?.iter().enumerate() {
            for k in 0..f.ncols() {
                for m in 0..f.nrows() {
                    let z = f[(m, k)];
                    w.write_record([
                        level.to_string(),
                        node.to_string(),
                        m.to_string(),
                        k.to_string(),
                        format_f64(z.re),
                        format_f64(z.im),
                    ])
                    .map_err(csv_error)?;
                }
            }
        }
    }
    finish(w)
}
