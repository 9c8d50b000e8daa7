use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Dilatational part `V(q̄)`, a function of the mean log invariant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dilatational {
    None,
    /// `½ k q̄²`
    HarmonicWell { k: f64 },
    /// `0` for `|q̄| ≤ width/2`, `+∞` outside.
    Box { width: f64 },
    /// `k |q̄|^e / e`
    SteepOscillator { k: f64, exponent: f64 },
}

/// Pair part `Σ_{a<b} f(qᵃ − qᵇ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pairwise {
    /// `½ k x²`
    HarmonicShear { k: f64 },
}

/// Potential depending on the deformation invariants only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPotential", into = "RawPotential")]
pub struct PotentialSpec {
    pub dilatational: Dilatational,
    pub pairwise: Option<Pairwise>,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self::none()
    }
}

impl PotentialSpec {
    pub fn none() -> Self {
        Self { dilatational: Dilatational::None, pairwise: None }
    }

    pub fn harmonic_well(k: f64) -> Self {
        Self { dilatational: Dilatational::HarmonicWell { k }, pairwise: None }
    }

    pub fn box_well(width: f64) -> Self {
        Self { dilatational: Dilatational::Box { width }, pairwise: None }
    }

    pub fn steep_oscillator(k: f64, exponent: f64) -> Self {
        Self { dilatational: Dilatational::SteepOscillator { k, exponent }, pairwise: None }
    }

    pub fn with_pairwise(mut self, pairwise: Pairwise) -> Self {
        self.pairwise = Some(pairwise);
        self
    }

    pub fn is_none(&self) -> bool {
        self.dilatational == Dilatational::None && self.pairwise.is_none()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Domain(format!("invalid potential parameter: {what}")));
        match self.dilatational {
            Dilatational::None => {}
            Dilatational::HarmonicWell { k } if !k.is_finite() => return bad("k"),
            Dilatational::Box { width } if !(width.is_finite() && width > 0.0) => return bad("width"),
            Dilatational::SteepOscillator { k, exponent } => {
                if !k.is_finite() {
                    return bad("k");
                }
                if !(exponent.is_finite() && exponent >= 1.0) {
                    return bad("exponent");
                }
            }
            _ => {}
        }
        if let Some(Pairwise::HarmonicShear { k }) = self.pairwise {
            if !k.is_finite() {
                return bad("pairwise k");
            }
        }
        Ok(())
    }

    pub fn dilatational_value(&self, q_bar: f64) -> f64 {
        match self.dilatational {
            Dilatational::None => 0.0,
            Dilatational::HarmonicWell { k } => 0.5 * k * q_bar * q_bar,
            Dilatational::Box { width } => {
                if q_bar.abs() <= 0.5 * width {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Dilatational::SteepOscillator { k, exponent } => k * q_bar.abs().powf(exponent) / exponent,
        }
    }

    pub fn dilatational_derivative(&self, q_bar: f64) -> f64 {
        match self.dilatational {
            Dilatational::None | Dilatational::Box { .. } => 0.0,
            Dilatational::HarmonicWell { k } => k * q_bar,
            Dilatational::SteepOscillator { k, exponent } => {
                k * q_bar.abs().powf(exponent - 1.0) * q_bar.signum()
            }
        }
    }

    fn pair_value(&self, x: f64) -> f64 {
        match self.pairwise {
            None => 0.0,
            Some(Pairwise::HarmonicShear { k }) => 0.5 * k * x * x,
        }
    }

    fn pair_derivative(&self, x: f64) -> f64 {
        match self.pairwise {
            None => 0.0,
            Some(Pairwise::HarmonicShear { k }) => k * x,
        }
    }

    pub fn value(&self, q: &[f64]) -> f64 {
        let n = q.len();
        let q_bar = q.iter().sum::<f64>() / n as f64;
        let mut v = self.dilatational_value(q_bar);
        if self.pairwise.is_some() {
            for a in 0..n {
                for b in (a + 1)..n {
                    v += self.pair_value(q[a] - q[b]);
                }
            }
        }
        v
    }

    /// `∂V/∂qᵃ`.
    pub fn gradient(&self, q: &[f64]) -> Vec<f64> {
        let n = q.len();
        let q_bar = q.iter().sum::<f64>() / n as f64;
        let dv = self.dilatational_derivative(q_bar) / n as f64;
        let mut g = vec![dv; n];
        if self.pairwise.is_some() {
            for a in 0..n {
                for b in (a + 1)..n {
                    let f = self.pair_derivative(q[a] - q[b]);
                    g[a] += f;
                    g[b] -= f;
                }
            }
        }
        g
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    kind: String,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    params: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pairwise: Option<RawPair>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    kind: String,
    #[serde(default)]
    params: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KParams {
    k: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WidthParams {
    width: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SteepParams {
    k: f64,
    exponent: f64,
}

fn params<T: for<'de> Deserialize<'de>>(kind: &str, value: Value) -> Result<T> {
    serde_json::from_value(value)
        .map_err(|e| Error::Parse(format!("potential {kind}: {e}")))
}

impl TryFrom<RawPotential> for PotentialSpec {
    type Error = Error;

    fn try_from(raw: RawPotential) -> Result<Self> {
        let dilatational = match raw.kind.as_str() {
            "None" => {
                if !(raw.params.is_null() || raw.params.as_object().is_some_and(|o| o.is_empty())) {
                    return Err(Error::Parse("potential None takes no params".into()));
                }
                Dilatational::None
            }
            "HarmonicWell" => Dilatational::HarmonicWell { k: params::<KParams>("HarmonicWell", raw.params)?.k },
            "Box" => Dilatational::Box { width: params::<WidthParams>("Box", raw.params)?.width },
            "SteepOscillator" => {
                let p: SteepParams = params("SteepOscillator", raw.params)?;
                Dilatational::SteepOscillator { k: p.k, exponent: p.exponent }
            }
            other => return Err(Error::Parse(format!("unknown potential kind {other:?}"))),
        };
        let pairwise = match raw.pairwise {
            None => None,
            Some(pair) => match pair.kind.as_str() {
                "HarmonicShear" => Some(Pairwise::HarmonicShear { k: params::<KParams>("HarmonicShear", pair.params)?.k }),
                other => return Err(Error::Parse(format!("unknown pairwise potential kind {other:?}"))),
            },
        };
        let spec = PotentialSpec { dilatational, pairwise };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<PotentialSpec> for RawPotential {
    fn from(spec: PotentialSpec) -> Self {
        let to_value = |v: serde_json::Result<Value>| v.unwrap_or(Value::Null);
        let (kind, params) = match spec.dilatational {
            Dilatational::None => ("None", Value::Null),
            Dilatational::HarmonicWell { k } => ("HarmonicWell", to_value(serde_json::to_value(KParams { k }))),
            Dilatational::Box { width } => ("Box", to_value(serde_json::to_value(WidthParams { width }))),
            Dilatational::SteepOscillator { k, exponent } => (
                "SteepOscillator",
                to_value(serde_json::to_value(SteepParams { k, exponent })),
            ),
        };
        let pairwise = spec.pairwise.map(|p| match p {
            Pairwise::HarmonicShear { k } => RawPair {
                kind: "HarmonicShear".into(),
                params: to_value(serde_json::to_value(KParams { k })),
            },
        });
        RawPotential { kind: kind.into(), params, pairwise }
    }
}
