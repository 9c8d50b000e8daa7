use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Largest label accepted by the spectral problems.
pub const MAX_LABEL: f64 = 4.0;

/// Non-negative half-integer `s`, stored as `2s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SpinLabel {
    twice: u32,
}

impl SpinLabel {
    pub fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    pub fn integer(s: u32) -> Self {
        Self { twice: 2 * s }
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// `2s + 1`
    pub fn multiplicity(self) -> usize {
        self.twice as usize + 1
    }

    /// `s(s + 1)`
    pub fn casimir(self) -> f64 {
        let s = self.value();
        s * (s + 1.0)
    }
}

impl TryFrom<f64> for SpinLabel {
    type Error = Error;

    fn try_from(s: f64) -> Result<Self> {
        let twice = 2.0 * s;
        if !(s.is_finite() && s >= 0.0) || (twice - twice.round()).abs() > 1e-12 || twice > u32::MAX as f64 {
            return Err(Error::InvalidLabel(format!("{s} is not a non-negative half-integer")));
        }
        Ok(Self { twice: twice.round() as u32 })
    }
}

impl From<SpinLabel> for f64 {
    fn from(l: SpinLabel) -> f64 {
        l.value()
    }
}

impl fmt::Display for SpinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Angular-momentum matrices of one irreducible block, basis ordered `m = s, s−1, …, −s`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinBlock {
    pub label: SpinLabel,
    pub hbar: f64,
    pub s1: CMatrix,
    pub s2: CMatrix,
    pub s3: CMatrix,
}

impl SpinBlock {
    pub fn dim(&self) -> usize {
        self.label.multiplicity()
    }

    pub fn components(&self) -> [&CMatrix; 3] {
        [&self.s1, &self.s2, &self.s3]
    }

    /// `S₁² + S₂² + S₃²`.
    pub fn casimir_matrix(&self) -> CMatrix {
        &self.s1 * &self.s1 + &self.s2 * &self.s2 + &self.s3 * &self.s3
    }

    /// `max ‖[Sᵢ, Sⱼ] − iħ εᵢⱼₖ Sₖ‖` over the cyclic pairs.
    pub fn commutator_residual(&self) -> f64 {
        let ih = Complex64::new(0.0, self.hbar);
        let c = |a: &CMatrix, b: &CMatrix, c: &CMatrix| (a * b - b * a - c * ih).norm();
        c(&self.s1, &self.s2, &self.s3)
            .max(c(&self.s2, &self.s3, &self.s1))
            .max(c(&self.s3, &self.s1, &self.s2))
    }

    /// `‖ΣSₖ² − ħ²s(s+1)·I‖`.
    pub fn casimir_residual(&self) -> f64 {
        let d = self.dim();
        let target = CMatrix::identity(d, d) * Complex64::from(self.hbar * self.hbar * self.label.casimir());
        (self.casimir_matrix() - target).norm()
    }

    /// Generator attached to the index pair `(a, b)`, `a < b`, of the 3×3 skew couplings:
    /// `(1,2) ↦ S₃`, `(1,3) ↦ S₂`, `(2,3) ↦ S₁` (zero-based indices).
    pub fn pair_generator(&self, a: usize, b: usize) -> Result<&CMatrix> {
        match (a, b) {
            (0, 1) => Ok(&self.s3),
            (0, 2) => Ok(&self.s2),
            (1, 2) => Ok(&self.s1),
            _ => Err(Error::ShapeMismatch(format!("no generator for pair ({}, {})", a + 1, b + 1))),
        }
    }
}

/// Ladder-operator construction of `S₁, S₂, S₃` for label `s`.
pub fn spin_matrices(label: SpinLabel, hbar: f64) -> SpinBlock {
    let d = label.multiplicity();
    let s = label.value();
    let m = |i: usize| s - i as f64;
    // S₊|m⟩ = ħ sqrt(s(s+1) − m(m+1)) |m+1⟩; index i ↔ m = s − i
    let mut plus = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        let mi = m(i);
        plus[(i - 1, i)] = hbar * (s * (s + 1.0) - mi * (mi + 1.0)).max(0.0).sqrt();
    }
    let minus = plus.transpose();
    let s1 = (&plus + &minus).map(|v| Complex64::new(0.5 * v, 0.0));
    let s2 = (&plus - &minus).map(|v| Complex64::new(0.0, -0.5 * v));
    let s3 = CMatrix::from_fn(d, d, |i, j| if i == j { Complex64::new(hbar * m(i), 0.0) } else { Complex64::new(0.0, 0.0) });
    SpinBlock { label, hbar, s1, s2, s3 }
}
