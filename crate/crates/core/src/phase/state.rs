use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::Matrix;

/// Skew-symmetric `n×n` matrix stored as its strictly upper triangle,
/// row-major: `(0,1), (0,2), …, (0,n-1), (1,2), …`.
/// Serialized as a full row-major nested array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SkewMatrix {
    n: usize,
    upper: Vec<f64>,
}

/// Number of strictly-upper entries of an `n×n` matrix.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of `(a, b)`, `a < b`, in strictly-upper row-major order.
pub fn pair_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

/// All `(a, b)` with `a < b` in storage order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| ((a + 1)..n).map(move |b| (a, b)))
}

impl SkewMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, upper: vec![0.0; pair_count(n)] }
    }

    pub fn from_upper(n: usize, upper: Vec<f64>) -> Result<Self> {
        if upper.len() != pair_count(n) {
            return Err(Error::ShapeMismatch(format!(
                "expected {} upper entries for n = {n}, got {}",
                pair_count(n),
                upper.len()
            )));
        }
        Ok(Self { n, upper })
    }

    /// Takes the strictly upper triangle; fails if `m` is not skew to `tol`.
    pub fn from_matrix(m: &Matrix, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::ShapeMismatch("skew matrix must be square".into()));
        }
        let n = m.nrows();
        let scale = m.norm().max(1.0);
        if (m + m.transpose()).norm() > tol * scale {
            return Err(Error::Domain("matrix is not skew-symmetric".into()));
        }
        let upper = pairs(n).map(|(a, b)| 0.5 * (m[(a, b)] - m[(b, a)])).collect();
        Ok(Self { n, upper })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn upper_mut(&mut self) -> &mut [f64] {
        &mut self.upper
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        use std::cmp::Ordering::*;
        match a.cmp(&b) {
            Less => self.upper[pair_index(self.n, a, b)],
            Greater => -self.upper[pair_index(self.n, b, a)],
            Equal => 0.0,
        }
    }

    /// Sets entry `(a, b)` and its mirror `(b, a) = -value`.
    pub fn set(&mut self, a: usize, b: usize, value: f64) {
        use std::cmp::Ordering::*;
        match a.cmp(&b) {
            Less => self.upper[pair_index(self.n, a, b)] = value,
            Greater => self.upper[pair_index(self.n, b, a)] = -value,
            Equal => {}
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.n, self.n, |a, b| self.get(a, b))
    }

    /// `Σ_{a<b} X_ab²`, equal to `-½ Tr(X²)`.
    pub fn norm_squared(&self) -> f64 {
        self.upper.iter().map(|v| v * v).sum()
    }

    pub fn combine(&self, other: &Self, alpha: f64, beta: f64) -> Self {
        let upper = self
            .upper
            .iter()
            .zip(&other.upper)
            .map(|(x, y)| alpha * x + beta * y)
            .collect();
        Self { n: self.n, upper }
    }
}

impl TryFrom<Vec<Vec<f64>>> for SkewMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch("skew matrix rows must form a square".into()));
        }
        let m = Matrix::from_fn(n, n, |a, b| rows[a][b]);
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite skew matrix entry".into()));
        }
        SkewMatrix::from_matrix(&m, 1e-12)
    }
}

impl From<SkewMatrix> for Vec<Vec<f64>> {
    fn from(s: SkewMatrix) -> Self {
        (0..s.n).map(|a| (0..s.n).map(|b| s.get(a, b)).collect()).collect()
    }
}

/// Closed classical state `(q, p, M, N)` of the invariant sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducedState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    #[serde(rename = "M")]
    pub m: SkewMatrix,
    #[serde(rename = "N")]
    pub n: SkewMatrix,
}

impl ReducedState {
    pub fn new(q: Vec<f64>, p: Vec<f64>, m: SkewMatrix, n: SkewMatrix) -> Result<Self> {
        let dim = q.len();
        if p.len() != dim || m.dim() != dim || n.dim() != dim {
            return Err(Error::ShapeMismatch(format!(
                "inconsistent state sizes: q {}, p {}, M {}, N {}",
                dim,
                p.len(),
                m.dim(),
                n.dim()
            )));
        }
        let state = Self { q, p, m, n };
        if !state.is_finite() {
            return Err(Error::Domain("non-finite state component".into()));
        }
        Ok(state)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            q: vec![0.0; n],
            p: vec![0.0; n],
            m: SkewMatrix::zeros(n),
            n: SkewMatrix::zeros(n),
        }
    }

    /// Builds the state from the co-moving spins `ρ̂`, `τ̂`.
    pub fn from_rho_tau(q: Vec<f64>, p: Vec<f64>, rho: &SkewMatrix, tau: &SkewMatrix) -> Result<Self> {
        let m = rho.combine(tau, -1.0, -1.0);
        let n = rho.combine(tau, 1.0, -1.0);
        Self::new(q, p, m, n)
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// `ρ̂ = (N − M)/2`
    pub fn rho(&self) -> SkewMatrix {
        self.n.combine(&self.m, 0.5, -0.5)
    }

    /// `τ̂ = −(M + N)/2`
    pub fn tau(&self) -> SkewMatrix {
        self.m.combine(&self.n, -0.5, -0.5)
    }

    /// Mean log invariant `q̄`.
    pub fn q_bar(&self) -> f64 {
        self.q.iter().sum::<f64>() / self.dim() as f64
    }

    /// Total dilatational momentum `p̄ = Σ pₐ`.
    pub fn p_bar(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn is_finite(&self) -> bool {
        self.q
            .iter()
            .chain(&self.p)
            .chain(self.m.upper())
            .chain(self.n.upper())
            .all(|v| v.is_finite())
    }

    /// Length of the flat coordinate vector `(q, p, M_upper, N_upper)`.
    pub fn flat_len(n: usize) -> usize {
        2 * n + 2 * pair_count(n)
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut z = Vec::with_capacity(Self::flat_len(self.dim()));
        z.extend_from_slice(&self.q);
        z.extend_from_slice(&self.p);
        z.extend_from_slice(self.m.upper());
        z.extend_from_slice(self.n.upper());
        z
    }

    pub fn from_flat(n: usize, z: &[f64]) -> Result<Self> {
        if z.len() != Self::flat_len(n) {
            return Err(Error::ShapeMismatch(format!(
                "flat state of length {} does not match n = {n}",
                z.len()
            )));
        }
        let k = pair_count(n);
        Ok(Self {
            q: z[..n].to_vec(),
            p: z[n..2 * n].to_vec(),
            m: SkewMatrix::from_upper(n, z[2 * n..2 * n + k].to_vec())?,
            n: SkewMatrix::from_upper(n, z[2 * n + k..].to_vec())?,
        })
    }

    /// Flat offsets of the four blocks.
    pub fn offsets(n: usize) -> FlatLayout {
        let k = pair_count(n);
        FlatLayout { n, q: 0, p: n, m: 2 * n, nn: 2 * n + k, pairs: k }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlatLayout {
    pub n: usize,
    pub q: usize,
    pub p: usize,
    pub m: usize,
    pub nn: usize,
    pub pairs: usize,
}

impl FlatLayout {
    pub fn len(&self) -> usize {
        self.nn + self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
