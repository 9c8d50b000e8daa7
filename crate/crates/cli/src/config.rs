use std::path::{Path, PathBuf};

use affine_body::dynamics::integrate::StepControl;
use affine_body::phase::model::ModelSpec;
use affine_body::phase::potential::PotentialSpec;
use affine_body::phase::state::ReducedState;
use affine_body::quantum::problem::{Axis, Boundary, LabelMode, Sector};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// One experiment. The `command` key selects the variant; every variant rejects unknown keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RunConfig {
    Simulate {
        model: ModelSpec,
        #[serde(default)]
        potential: PotentialSpec,
        initial: ReducedState,
        numerics: SimulateNumerics,
        #[serde(default)]
        output: Option<Output>,
        #[serde(default)]
        seed: Option<u64>,
    },
    Geodesic {
        model: ModelSpec,
        initial: GeodesicInitial,
        #[serde(default)]
        numerics: GeodesicNumerics,
        #[serde(default)]
        output: Option<Output>,
        #[serde(default)]
        seed: Option<u64>,
    },
    Classify {
        #[serde(default)]
        model: Option<ModelSpec>,
        initial: ClassifyInitial,
        #[serde(default)]
        output: Option<Output>,
        #[serde(default)]
        seed: Option<u64>,
    },
    Spectrum {
        model: ModelSpec,
        #[serde(default)]
        potential: PotentialSpec,
        numerics: SpectrumNumerics,
        #[serde(default)]
        output: Option<Output>,
        #[serde(default)]
        seed: Option<u64>,
    },
    CheckBrackets {
        #[serde(default)]
        numerics: CheckNumerics,
        #[serde(default)]
        output: Option<Output>,
        #[serde(default)]
        seed: Option<u64>,
    },
    CheckDecomp {
        #[serde(default)]
        numerics: DecompNumerics,
        #[serde(default)]
        output: Option<Output>,
        #[serde(default)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

/// Declared artifact. Relative paths resolve against `--output-dir`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Option<Format>,
    /// Spectrum only: eigenvector dump `level,node,m,k,re,im`.
    #[serde(default)]
    pub eigenvectors: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateNumerics {
    pub t_end: f64,
    pub integrator: StepControl,
    /// Relative energy drift above which the run counts as non-conforming.
    #[serde(default = "default_energy_tolerance")]
    pub tolerance: f64,
}

fn default_energy_tolerance() -> f64 {
    1e-6
}

/// Either explicit `phi0` and `Omega`, or a dimension `n` for a seeded random draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicInitial {
    #[serde(default)]
    pub phi0: Option<Vec<Vec<f64>>>,
    #[serde(rename = "Omega", default)]
    pub omega: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default = "default_omega_scale")]
    pub omega_scale: f64,
}

fn default_omega_scale() -> f64 {
    0.3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicNumerics {
    pub t_end: f64,
    pub samples: usize,
    pub step: f64,
    pub tolerance: f64,
}

impl Default for GeodesicNumerics {
    fn default() -> Self {
        Self { t_end: 1.0, samples: 20, step: 1e-3, tolerance: 1e-6 }
    }
}

/// Planar couplings `M¹₂ = m`, `N¹₂ = n`, optionally an energy for turning points and period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyInitial {
    pub m: f64,
    pub n: f64,
    #[serde(default)]
    pub energy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumNumerics {
    pub n: usize,
    #[serde(default = "default_sector")]
    pub sector: Sector,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub label_mode: LabelMode,
    pub grid: Vec<Axis>,
    #[serde(default)]
    pub boundary: Option<Boundary>,
    #[serde(default = "default_true")]
    pub use_amended_transform: bool,
    #[serde(default = "default_levels")]
    pub levels: usize,
}

fn default_sector() -> Sector {
    Sector::Dilatation
}

fn default_true() -> bool {
    true
}

fn default_levels() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckNumerics {
    pub trials: usize,
}

impl Default for CheckNumerics {
    fn default() -> Self {
        Self { trials: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompNumerics {
    pub trials: usize,
    pub max_condition: f64,
}

impl Default for DecompNumerics {
    fn default() -> Self {
        Self { trials: 1000, max_condition: 1e6 }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn name(&self) -> &'static str {
        match self {
            RunConfig::Simulate { .. } => "simulate",
            RunConfig::Geodesic { .. } => "geodesic",
            RunConfig::Classify { .. } => "classify",
            RunConfig::Spectrum { .. } => "spectrum",
            RunConfig::CheckBrackets { .. } => "check-brackets",
            RunConfig::CheckDecomp { .. } => "check-decomp",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            RunConfig::Simulate { seed, .. }
            | RunConfig::Geodesic { seed, .. }
            | RunConfig::Classify { seed, .. }
            | RunConfig::Spectrum { seed, .. }
            | RunConfig::CheckBrackets { seed, .. }
            | RunConfig::CheckDecomp { seed, .. } => *seed,
        }
    }

    pub fn output(&self) -> Option<&Output> {
        match self {
            RunConfig::Simulate { output, .. }
            | RunConfig::Geodesic { output, .. }
            | RunConfig::Classify { output, .. }
            | RunConfig::Spectrum { output, .. }
            | RunConfig::CheckBrackets { output, .. }
            | RunConfig::CheckDecomp { output, .. } => output.as_ref(),
        }
    }
}
