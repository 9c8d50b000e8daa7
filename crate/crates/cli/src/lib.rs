//! Config-driven experiment runner.

pub mod config;

use std::path::{Path, PathBuf};

use affine_body::checks::{check_brackets, check_decomposition, random_configuration};
use affine_body::dynamics::geodesic::geodesic_dual_route;
use affine_body::dynamics::integrate::integrate;
use affine_body::dynamics::planar::{
    classify_planar, classify_planar_with_energy, planar_effective_potential, planar_minimum, planar_period,
    PlanarClassification, Verdict,
};
use affine_body::io::{eigenvectors_to_csv, format_f64, trajectory_to_csv, SpectrumReport};
use affine_body::kinematics::Matrix;
use affine_body::phase::state::ReducedState;
use affine_body::quantum::eigen::eigensolve;
use affine_body::quantum::operator::build_reduced_hamiltonian;
use affine_body::quantum::problem::SpectralProblem;
use affine_body::{Error, ErrorClass};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error as ThisError;

pub use config::{Format, Output, RunConfig};

/// Eigenvalues closer than this (relative) are reported as one level.
pub const LEVEL_TOL: f64 = 1e-9;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 2 config, 3 domain, 4 numeric, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e.class() {
                ErrorClass::Input => 2,
                ErrorClass::Domain => 3,
                ErrorClass::Numeric => 4,
            },
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub output_dir: Option<PathBuf>,
    /// Overrides the config seed.
    pub seed: Option<u64>,
}

/// Result of a successful run. `passed = false` marks a verification that ran but failed.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: String,
    pub artifacts: Vec<PathBuf>,
    pub passed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

fn matrix_from_rows(rows: &[Vec<f64>], what: &str) -> Result<Matrix, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Config(format!("{what} must be a non-empty square matrix")));
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))
}

struct Writer<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn write(&mut self, path: &Path, contents: &str) -> Result<(), CliError> {
        let full = if path.is_absolute() { path.to_path_buf() } else { self.dir.join(path) };
        if let Some(parent) = full.parent() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
        }
        std::fs::write(&full, contents).map_err(|e| CliError::Io(format!("{}: {e}", full.display())))?;
        self.written.push(full);
        Ok(())
    }
}

#[derive(Serialize)]
struct TrajectoryRecord<'a> {
    t: f64,
    state: &'a ReducedState,
    #[serde(rename = "E")]
    energy: f64,
    #[serde(rename = "C2")]
    casimir: Option<f64>,
}

#[derive(Serialize)]
struct GeodesicArtifact {
    phi0: Vec<Vec<f64>>,
    #[serde(rename = "Omega")]
    omega: Vec<Vec<f64>>,
    t_end: f64,
    samples: usize,
    initial: ReducedState,
    max_error: f64,
    tolerance: f64,
    passed: bool,
}

#[derive(Serialize)]
struct ClassifyArtifact {
    classification: PlanarClassification,
    x_min: Option<f64>,
    v_min: Option<f64>,
    energy: Option<f64>,
    period: Option<f64>,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".into(), format_f64)
}

/// Executes one configured experiment and writes its declared artifacts.
pub fn run(config: &RunConfig, options: &RunOptions) -> Result<Outcome, CliError> {
    let seed = options.seed.or(config.seed()).unwrap_or(0);
    let dir = options.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut out = Writer { dir: &dir, written: Vec::new() };
    let output = config.output();
    let mut passed = true;

    let summary = match config {
        RunConfig::Simulate { model, potential, initial, numerics, .. } => {
            let traj = integrate(model, potential, initial, numerics.t_end, &numerics.integrator)?;
            if let Some(o) = output {
                let text = match o.format.unwrap_or(Format::Csv) {
                    Format::Csv => trajectory_to_csv(&traj)?,
                    Format::Json => {
                        let records: Vec<TrajectoryRecord> = (0..traj.len())
                            .map(|k| TrajectoryRecord {
                                t: traj.times[k],
                                state: &traj.states[k],
                                energy: traj.energy[k],
                                casimir: Some(traj.casimir[k]).filter(|c| c.is_finite()),
                            })
                            .collect();
                        json(&records)?
                    }
                };
                out.write(&o.path, &text)?;
            }
            let casimir = if traj.casimir.iter().all(|c| c.is_finite()) { Some(traj.casimir_drift()) } else { None };
            format!(
                "command=simulate samples={} energy_drift={} casimir_drift={} conforming={}",
                traj.len(),
                format_f64(traj.energy_drift()),
                opt(casimir),
                traj.is_conforming(numerics.tolerance)
            )
        }
        RunConfig::Geodesic { model, initial, numerics, .. } => {
            let (phi0, omega) = match (&initial.phi0, &initial.omega, initial.n) {
                (Some(p), Some(o), None) => (matrix_from_rows(p, "phi0")?, matrix_from_rows(o, "Omega")?),
                (None, None, Some(n)) if (2..=8).contains(&n) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let phi0 = random_configuration(&mut rng, n, 10.0, true);
                    let s = initial.omega_scale;
                    (phi0, Matrix::from_fn(n, n, |_, _| rng.random_range(-s..=s)))
                }
                _ => {
                    return Err(CliError::Config(
                        "geodesic initial needs either phi0 and Omega, or n in 2..=8".into(),
                    ))
                }
            };
            if omega.nrows() != phi0.nrows() {
                return Err(CliError::Config("phi0 and Omega differ in size".into()));
            }
            let report = geodesic_dual_route(&phi0, &omega, model, numerics.t_end, numerics.samples, numerics.step)?;
            passed = report.max_error < numerics.tolerance;
            if let Some(o) = output {
                let artifact = GeodesicArtifact {
                    phi0: rows_of(&phi0),
                    omega: rows_of(&omega),
                    t_end: numerics.t_end,
                    samples: numerics.samples,
                    initial: report.initial.clone(),
                    max_error: report.max_error,
                    tolerance: numerics.tolerance,
                    passed,
                };
                out.write(&o.path, &json(&artifact)?)?;
            }
            format!("command=geodesic n={} max_error={} passed={passed}", phi0.nrows(), format_f64(report.max_error))
        }
        RunConfig::Classify { model, initial, .. } => {
            let (m, n) = (initial.m, initial.n);
            let a_const = model.as_ref().and_then(|s| s.a_const);
            let mut artifact =
                ClassifyArtifact { classification: classify_planar(m, n), x_min: None, v_min: None, energy: initial.energy, period: None };
            if artifact.classification.verdict == Verdict::Bounded {
                let x_min = planar_minimum(m, n)?;
                artifact.x_min = Some(x_min);
                if let Some(a) = a_const {
                    artifact.v_min = Some(planar_effective_potential(m, n, a, x_min)?);
                }
            }
            if let Some(e) = initial.energy {
                let a = a_const.ok_or_else(|| CliError::Config("an energy needs model.A".into()))?;
                artifact.classification = classify_planar_with_energy(m, n, a, e)?;
                if artifact.classification.verdict == Verdict::Bounded {
                    artifact.period = Some(planar_period(m, n, a, e)?);
                }
            }
            if let Some(o) = output {
                out.write(&o.path, &json(&artifact)?)?;
            }
            let mut line = format!("command=classify verdict={} m={} n={}", artifact.classification.verdict, format_f64(m), format_f64(n));
            if let Some(x) = artifact.x_min {
                line += &format!(" x_min={}", format_f64(x));
            }
            if let Some((lo, hi)) = artifact.classification.turning_points {
                line += &format!(" turning_points={},{}", format_f64(lo), format_f64(hi));
            }
            if let Some(t) = artifact.period {
                line += &format!(" period={}", format_f64(t));
            }
            line
        }
        RunConfig::Spectrum { model, potential, numerics, .. } => {
            let problem = SpectralProblem {
                n: numerics.n,
                model: model.clone(),
                potential: *potential,
                sector: numerics.sector,
                alpha: numerics.alpha,
                beta: numerics.beta,
                label_mode: numerics.label_mode,
                grid: numerics.grid.clone(),
                boundary: numerics.boundary,
                use_amended_transform: numerics.use_amended_transform,
            };
            let op = build_reduced_hamiltonian(&problem)?;
            let spectrum = eigensolve(&op, numerics.levels)?;
            let report = SpectrumReport::new(&problem, &op, &spectrum, LEVEL_TOL);
            if let Some(o) = output {
                out.write(&o.path, &report.to_json()?)?;
                if let Some(path) = &o.eigenvectors {
                    out.write(path, &eigenvectors_to_csv(&op, &spectrum)?)?;
                }
            }
            let values: Vec<String> = spectrum.eigenvalues.iter().map(|v| format_f64(*v)).collect();
            format!(
                "command=spectrum unknowns={} max_residual={} eigenvalues={}",
                op.dim(),
                format_f64(spectrum.max_relative_residual()),
                values.join(",")
            )
        }
        RunConfig::CheckBrackets { numerics, .. } => {
            let report = check_brackets(seed, numerics.trials)?;
            passed = report.passed;
            if let Some(o) = output {
                out.write(&o.path, &json(&report)?)?;
            }
            format!(
                "command=check-brackets seed={seed} trials={} max_residual={} passed={passed}",
                report.trials,
                format_f64(report.max_residual)
            )
        }
        RunConfig::CheckDecomp { numerics, .. } => {
            let report = check_decomposition(seed, numerics.trials, numerics.max_condition)?;
            passed = report.passed;
            if let Some(o) = output {
                out.write(&o.path, &json(&report)?)?;
            }
            format!(
                "command=check-decomp seed={seed} trials={} reconstruction={} orthogonality={} singular_values={} passed={passed}",
                report.trials,
                format_f64(report.reconstruction),
                format_f64(report.orthogonality),
                format_f64(report.singular_values)
            )
        }
    };
    Ok(Outcome { summary, artifacts: out.written, passed })
}
