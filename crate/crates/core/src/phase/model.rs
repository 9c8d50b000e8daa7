use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    DAlembert,
    AffAff,
    AffMetr,
    MetrAff,
    MetrMetr,
    TrigUn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::DAlembert,
        ModelKind::AffAff,
        ModelKind::AffMetr,
        ModelKind::MetrAff,
        ModelKind::MetrMetr,
        ModelKind::TrigUn,
    ];

    /// Kinds whose pair couplings are hyperbolic (`sh`, `ch`).
    pub fn is_hyperbolic(self) -> bool {
        matches!(self, ModelKind::AffAff | ModelKind::AffMetr | ModelKind::MetrAff | ModelKind::MetrMetr)
    }

    /// Kinds whose Casimir `C_SL(n)(2)` is conserved.
    pub fn conserves_csl2(self) -> bool {
        self.is_hyperbolic()
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ModelKind::DAlembert => "DAlembert",
            ModelKind::AffAff => "AffAff",
            ModelKind::AffMetr => "AffMetr",
            ModelKind::MetrAff => "MetrAff",
            ModelKind::MetrMetr => "MetrMetr",
            ModelKind::TrigUn => "TrigUn",
        };
        f.write_str(s)
    }
}

fn default_hbar() -> f64 {
    1.0
}

/// Kinetic model and its inertial constants. Unused constants may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(rename = "I", default, skip_serializing_if = "Option::is_none")]
    pub inertia: Option<f64>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a_const: Option<f64>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b_const: Option<f64>,
    #[serde(rename = "I1", default, skip_serializing_if = "Option::is_none")]
    pub i1: Option<f64>,
    #[serde(rename = "I2", default, skip_serializing_if = "Option::is_none")]
    pub i2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
}

/// Coefficients of the reduced Hamiltonian
/// `κ_C·C(2) + κ_p·p̄² + κ_S‖ρ̂‖² + κ_V‖τ̂‖² + V(q)`,
/// or the d'Alembert inertia.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coefficients {
    Invariant { kappa_c: f64, kappa_p: f64, kappa_s: f64, kappa_v: f64, trig: bool },
    DAlembert { inertia: f64 },
}

impl ModelSpec {
    fn blank(kind: ModelKind) -> Self {
        Self {
            kind,
            m: None,
            inertia: None,
            a_const: None,
            b_const: None,
            i1: None,
            i2: None,
            a: None,
            b: None,
            c: None,
            d: None,
            hbar: 1.0,
        }
    }

    pub fn dalembert(inertia: f64) -> Self {
        Self { inertia: Some(inertia), ..Self::blank(ModelKind::DAlembert) }
    }

    pub fn aff_aff(a: f64, b: f64) -> Self {
        Self { a_const: Some(a), b_const: Some(b), ..Self::blank(ModelKind::AffAff) }
    }

    pub fn aff_metr(inertia: f64, a: f64, b: f64) -> Self {
        Self {
            inertia: Some(inertia),
            a_const: Some(a),
            b_const: Some(b),
            ..Self::blank(ModelKind::AffMetr)
        }
    }

    pub fn metr_aff(inertia: f64, a: f64, b: f64) -> Self {
        Self {
            inertia: Some(inertia),
            a_const: Some(a),
            b_const: Some(b),
            ..Self::blank(ModelKind::MetrAff)
        }
    }

    pub fn metr_metr(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a: Some(a), b: Some(b), c: Some(c), d: Some(d), ..Self::blank(ModelKind::MetrMetr) }
    }

    pub fn trig_un(a: f64, b: f64) -> Self {
        Self { a_const: Some(a), b_const: Some(b), ..Self::blank(ModelKind::TrigUn) }
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    fn need(&self, value: Option<f64>, name: &str) -> Result<f64> {
        let v = value.ok_or_else(|| {
            Error::Domain(format!("model {} requires constant {name}", self.kind))
        })?;
        if !v.is_finite() {
            return Err(Error::Domain(format!("constant {name} must be finite")));
        }
        Ok(v)
    }

    fn nonzero(value: f64, what: &str) -> Result<f64> {
        if value == 0.0 || !value.is_finite() {
            return Err(Error::Domain(format!("{what} must be finite and nonzero")));
        }
        Ok(value)
    }

    /// `α = I + A`
    pub fn alpha(&self) -> Result<f64> {
        Ok(self.need(self.inertia, "I")? + self.need(self.a_const, "A")?)
    }

    /// `β = −(I+A)(I+A+nB)/B`; undefined at `B = 0`.
    pub fn beta(&self, n: usize) -> Result<f64> {
        let alpha = self.alpha()?;
        let b = Self::nonzero(self.need(self.b_const, "B")?, "B")?;
        Ok(-alpha * (alpha + n as f64 * b) / b)
    }

    /// `μ = (I² − A²)/I`
    pub fn mu(&self) -> Result<f64> {
        let i = Self::nonzero(self.need(self.inertia, "I")?, "I")?;
        let a = self.need(self.a_const, "A")?;
        Self::nonzero((i * i - a * a) / i, "I² − A²")
    }

    /// Hamiltonian coefficients for dimension `n`; fails when a denominator vanishes.
    pub fn coefficients(&self, n: usize) -> Result<Coefficients> {
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::Domain("hbar must be positive".into()));
        }
        let nf = n as f64;
        let affine = |a: f64, b: f64| -> Result<(f64, f64)> {
            let a = Self::nonzero(a, "A")?;
            let total = Self::nonzero(a + nf * b, "A + nB")?;
            Ok((0.5 / a, 0.5 / (nf * total)))
        };
        match self.kind {
            ModelKind::DAlembert => {
                let inertia = Self::nonzero(self.need(self.inertia, "I")?, "I")?;
                Ok(Coefficients::DAlembert { inertia })
            }
            ModelKind::AffAff | ModelKind::TrigUn => {
                let (kappa_c, kappa_p) =
                    affine(self.need(self.a_const, "A")?, self.need(self.b_const, "B")?)?;
                Ok(Coefficients::Invariant {
                    kappa_c,
                    kappa_p,
                    kappa_s: 0.0,
                    kappa_v: 0.0,
                    trig: self.kind == ModelKind::TrigUn,
                })
            }
            ModelKind::AffMetr | ModelKind::MetrAff => {
                let (kappa_c, kappa_p) = affine(self.alpha()?, self.need(self.b_const, "B")?)?;
                let extra = 0.5 / self.mu()?;
                let (kappa_s, kappa_v) =
                    if self.kind == ModelKind::MetrAff { (extra, 0.0) } else { (0.0, extra) };
                Ok(Coefficients::Invariant { kappa_c, kappa_p, kappa_s, kappa_v, trig: false })
            }
            ModelKind::MetrMetr => {
                let inv = |v: Option<f64>, name: &str| -> Result<f64> {
                    Ok(0.5 / Self::nonzero(self.need(v, name)?, name)?)
                };
                Ok(Coefficients::Invariant {
                    kappa_c: inv(self.a, "a")?,
                    kappa_p: inv(self.b, "b")?,
                    kappa_s: inv(self.c, "c")?,
                    kappa_v: inv(self.d, "d")?,
                    trig: false,
                })
            }
        }
    }

    /// The same model with the `‖S‖²`/`‖V‖²` coefficient removed.
    pub fn coefficients_without_rotational(&self, n: usize) -> Result<Coefficients> {
        Ok(match self.coefficients(n)? {
            Coefficients::Invariant { kappa_c, kappa_p, trig, .. } => {
                Coefficients::Invariant { kappa_c, kappa_p, kappa_s: 0.0, kappa_v: 0.0, trig }
            }
            other => other,
        })
    }
}
