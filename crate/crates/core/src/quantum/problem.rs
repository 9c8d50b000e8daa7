use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::model::{Coefficients, ModelKind, ModelSpec};
use crate::phase::potential::PotentialSpec;
use crate::quantum::spin::{SpinLabel, MAX_LABEL};

pub const MIN_POINTS: usize = 16;
/// Largest dense operator the eigensolver accepts.
pub const MAX_UNKNOWNS: usize = 4096;

/// Which part of the separated problem is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    /// One coordinate, the mean log invariant `q̄`; the amplitude components decouple.
    Dilatation,
    /// The `n − 1` orthonormal traceless coordinates of the invariants, restricted to the
    /// open chamber `q¹ > q² > … > qⁿ`.
    Shape,
    /// d'Alembert model on the invariants `Qᵃ` themselves (`n = 2`), chamber `Q¹ > Q² > 0`.
    Cartesian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

/// Whether two-valued (half-integer) labels are admitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMode {
    #[default]
    Integer,
    Covering,
}

/// Grid along one coordinate. Dirichlet grids hold `points` interior nodes of `[min, max]`;
/// periodic grids hold `points` nodes of period `max − min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    #[serde(rename = "q_min")]
    pub min: f64,
    #[serde(rename = "q_max")]
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points }
    }

    pub fn step(&self, boundary: Boundary) -> f64 {
        match boundary {
            Boundary::Dirichlet => (self.max - self.min) / (self.points + 1) as f64,
            Boundary::Periodic => (self.max - self.min) / self.points as f64,
        }
    }

    pub fn node(&self, i: usize, boundary: Boundary) -> f64 {
        let h = self.step(boundary);
        match boundary {
            Boundary::Dirichlet => self.min + (i + 1) as f64 * h,
            Boundary::Periodic => self.min + i as f64 * h,
        }
    }
}

/// Angular labels: Fourier indices for `n = 2`, spin labels `(s, j)` for `n = 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Labels {
    Fourier { alpha: i32, beta: i32 },
    Spin { s: SpinLabel, j: SpinLabel },
}

impl Labels {
    /// `N(α)·N(β)`, the number of amplitude components.
    pub fn block_size(&self) -> usize {
        match *self {
            Labels::Fourier { .. } => 1,
            Labels::Spin { s, j } => s.multiplicity() * j.multiplicity(),
        }
    }

    /// Second-order `SO(n)` Casimir values `(C(α), C(β))` without `ħ²`.
    pub fn casimirs(&self) -> (f64, f64) {
        match *self {
            Labels::Fourier { alpha, beta } => ((alpha * alpha) as f64, (beta * beta) as f64),
            Labels::Spin { s, j } => (s.casimir(), j.casimir()),
        }
    }
}

/// Validates `(s, j)` (`n = 3`) or Fourier indices (`n = 2`).
pub fn parse_labels(n: usize, alpha: f64, beta: f64, mode: LabelMode) -> Result<Labels> {
    match n {
        2 => {
            let int = |v: f64, name: &str| -> Result<i32> {
                if !v.is_finite() || v.fract() != 0.0 || v.abs() > MAX_LABEL {
                    return Err(Error::InvalidLabel(format!(
                        "{name} = {v}: planar labels are integers with |·| ≤ {MAX_LABEL}"
                    )));
                }
                Ok(v as i32)
            };
            Ok(Labels::Fourier { alpha: int(alpha, "alpha")?, beta: int(beta, "beta")? })
        }
        3 => {
            let s = SpinLabel::try_from(alpha)?;
            let j = SpinLabel::try_from(beta)?;
            if s.value() > MAX_LABEL || j.value() > MAX_LABEL {
                return Err(Error::InvalidLabel(format!("labels are limited to {MAX_LABEL}")));
            }
            match mode {
                LabelMode::Integer if !(s.is_integer() && j.is_integer()) => Err(Error::InvalidLabel(format!(
                    "(s, j) = ({s}, {j}) needs covering mode for half-integers"
                ))),
                _ if (s.twice() + j.twice()) % 2 != 0 => Err(Error::InvalidLabel(format!(
                    "(s, j) = ({s}, {j}): j − s must be an integer"
                ))),
                _ => Ok(Labels::Spin { s, j }),
            }
        }
        _ => Err(Error::Domain(format!("spectral problems are defined for n = 2, 3 (got {n})"))),
    }
}

fn default_amended() -> bool {
    true
}

/// Reduced stationary Schrödinger problem for the amplitudes `f^{αβ}(q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralProblem {
    pub n: usize,
    pub model: ModelSpec,
    #[serde(default)]
    pub potential: PotentialSpec,
    pub sector: Sector,
    /// `s` for `n = 3`, left Fourier index for `n = 2`.
    #[serde(default)]
    pub alpha: f64,
    /// `j` for `n = 3`, right Fourier index for `n = 2`.
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub label_mode: LabelMode,
    pub grid: Vec<Axis>,
    /// Defaults to periodic for the unitary model's dilatation sector, Dirichlet otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Boundary>,
    #[serde(default = "default_amended")]
    pub use_amended_transform: bool,
}

impl SpectralProblem {
    /// Scalar-sector (`α = β = 0`) dilatation problem on `[min, max]`.
    pub fn dilatation(n: usize, model: ModelSpec, potential: PotentialSpec, axis: Axis) -> Self {
        Self {
            n,
            model,
            potential,
            sector: Sector::Dilatation,
            alpha: 0.0,
            beta: 0.0,
            label_mode: LabelMode::Integer,
            grid: vec![axis],
            boundary: None,
            use_amended_transform: true,
        }
    }

    pub fn with_labels(mut self, alpha: f64, beta: f64, mode: LabelMode) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self.label_mode = mode;
        self
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary.unwrap_or(if self.model.kind == ModelKind::TrigUn && self.sector == Sector::Dilatation {
            Boundary::Periodic
        } else {
            Boundary::Dirichlet
        })
    }

    pub fn labels(&self) -> Result<Labels> {
        parse_labels(self.n, self.alpha, self.beta, self.label_mode)
    }

    pub fn coefficients(&self) -> Result<Coefficients> {
        self.model.coefficients(self.n)
    }

    /// Checks dimensions, labels, sector compatibility and grid sizes.
    pub fn validate(&self) -> Result<Labels> {
        let labels = self.labels()?;
        self.coefficients()?;
        self.potential.validate()?;
        let kind = self.model.kind;
        let expected_axes = match self.sector {
            Sector::Dilatation => {
                if kind == ModelKind::DAlembert {
                    return Err(Error::Domain("the d'Alembert model has no separated dilatation sector".into()));
                }
                1
            }
            Sector::Shape => {
                if kind == ModelKind::DAlembert {
                    return Err(Error::Domain("use the cartesian sector for the d'Alembert model".into()));
                }
                self.n - 1
            }
            Sector::Cartesian => {
                if kind != ModelKind::DAlembert || self.n != 2 {
                    return Err(Error::Domain("the cartesian sector is the planar d'Alembert problem".into()));
                }
                2
            }
        };
        if self.grid.len() != expected_axes {
            return Err(Error::ShapeMismatch(format!(
                "{:?} sector for n = {} needs {expected_axes} grid axes, got {}",
                self.sector,
                self.n,
                self.grid.len()
            )));
        }
        if self.boundary() == Boundary::Periodic && !(kind == ModelKind::TrigUn && self.sector == Sector::Dilatation) {
            return Err(Error::Domain("periodic boundaries apply to the unitary model's dilatation sector".into()));
        }
        let mut nodes = 1usize;
        for (k, axis) in self.grid.iter().enumerate() {
            if axis.points < MIN_POINTS {
                return Err(Error::GridTooCoarse(format!(
                    "axis {} has {} points, at least {MIN_POINTS} required",
                    k + 1,
                    axis.points
                )));
            }
            if !(axis.min.is_finite() && axis.max.is_finite() && axis.max > axis.min) {
                return Err(Error::Domain(format!("axis {} needs finite q_min < q_max", k + 1)));
            }
            nodes = nodes.saturating_mul(axis.points);
        }
        if nodes.saturating_mul(labels.block_size()) > MAX_UNKNOWNS {
            return Err(Error::Domain(format!(
                "{} unknowns exceed the dense limit of {MAX_UNKNOWNS}",
                nodes.saturating_mul(labels.block_size())
            )));
        }
        Ok(labels)
    }
}

/// Constant block shift `ħ²[κ_S C(α) + κ_V C(β)]` added by the metric terms:
/// `(ħ²/2μ)s(s+1)` for MetrAff, `(ħ²/2μ)j(j+1)` for AffMetr,
/// `(ħ²/2c)s(s+1) + (ħ²/2d)j(j+1)` for MetrMetr, zero otherwise.
pub fn angular_shift(model: &ModelSpec, n: usize, labels: &Labels) -> Result<f64> {
    let (ca, cb) = labels.casimirs();
    let h2 = model.hbar * model.hbar;
    Ok(match model.coefficients(n)? {
        Coefficients::Invariant { kappa_s, kappa_v, .. } => h2 * (kappa_s * ca + kappa_v * cb),
        Coefficients::DAlembert { .. } => 0.0,
    })
}
