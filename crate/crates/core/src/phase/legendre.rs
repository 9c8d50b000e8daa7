//! Legendre maps between reduced velocities `(q̇ or Q̇, χ̂, ϑ̂)` and momenta.

use crate::error::{Error, Result};
use crate::phase::state::{pairs, SkewMatrix};

/// `|qᵃ − qᵇ|` below this is treated as a coincidence of invariants.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DAlembertMomenta {
    /// Momenta `Pₐ` conjugate to `Qᵃ`.
    pub p_cap: Vec<f64>,
    pub rho: SkewMatrix,
    pub tau: SkewMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DAlembertVelocities {
    pub q_cap_dot: Vec<f64>,
    pub chi: SkewMatrix,
    pub theta: SkewMatrix,
}

fn check_diagonal(d: &[f64]) -> Result<()> {
    if d.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Domain("deformation invariants must be positive and finite".into()));
    }
    Ok(())
}

fn check_sizes(n: usize, parts: &[usize]) -> Result<()> {
    if parts.iter().any(|&k| k != n) {
        return Err(Error::ShapeMismatch(format!("all inputs must have dimension {n}")));
    }
    Ok(())
}

/// `Pₐ = I·Q̇ᵃ`, `ρ̂ = I(D²χ̂ + χ̂D² − 2Dϑ̂D)`, `τ̂ = I(D²ϑ̂ + ϑ̂D² − 2Dχ̂D)`.
pub fn legendre_dalembert(
    d: &[f64],
    q_cap_dot: &[f64],
    chi: &SkewMatrix,
    theta: &SkewMatrix,
    inertia: f64,
) -> Result<DAlembertMomenta> {
    let n = d.len();
    check_sizes(n, &[q_cap_dot.len(), chi.dim(), theta.dim()])?;
    check_diagonal(d)?;
    if !(inertia > 0.0 && inertia.is_finite()) {
        return Err(Error::Domain("d'Alembert inertia must be positive".into()));
    }
    let p_cap = q_cap_dot.iter().map(|v| inertia * v).collect();
    let mut rho = SkewMatrix::zeros(n);
    let mut tau = SkewMatrix::zeros(n);
    for (a, b) in pairs(n) {
        let s2 = d[a] * d[a] + d[b] * d[b];
        let cross = 2.0 * d[a] * d[b];
        let u = chi.get(a, b);
        let v = theta.get(a, b);
        rho.set(a, b, inertia * (s2 * u - cross * v));
        tau.set(a, b, inertia * (s2 * v - cross * u));
    }
    Ok(DAlembertMomenta { p_cap, rho, tau })
}

/// Pairwise inverse of [`legendre_dalembert`]:
/// `χ̂ + ϑ̂ = (ρ̂ + τ̂)/(I(Qᵃ−Qᵇ)²)`, `χ̂ − ϑ̂ = (ρ̂ − τ̂)/(I(Qᵃ+Qᵇ)²)`.
pub fn inverse_legendre_dalembert(
    d: &[f64],
    p_cap: &[f64],
    rho: &SkewMatrix,
    tau: &SkewMatrix,
    inertia: f64,
) -> Result<DAlembertVelocities> {
    let n = d.len();
    check_sizes(n, &[p_cap.len(), rho.dim(), tau.dim()])?;
    check_diagonal(d)?;
    if !(inertia > 0.0 && inertia.is_finite()) {
        return Err(Error::Domain("d'Alembert inertia must be positive".into()));
    }
    let q_cap_dot = p_cap.iter().map(|v| v / inertia).collect();
    let mut chi = SkewMatrix::zeros(n);
    let mut theta = SkewMatrix::zeros(n);
    for (a, b) in pairs(n) {
        let sum = rho.get(a, b) + tau.get(a, b);
        let diff = rho.get(a, b) - tau.get(a, b);
        let gap = d[a] - d[b];
        let plus = if (d[a].ln() - d[b].ln()).abs() < DEGENERACY_TOL {
            if sum != 0.0 {
                return Err(Error::DegenerateInertia(format!(
                    "invariants {} and {} coincide with nonzero coupling",
                    a + 1,
                    b + 1
                )));
            }
            0.0
        } else {
            sum / (inertia * gap * gap)
        };
        let total = d[a] + d[b];
        let minus = diff / (inertia * total * total);
        chi.set(a, b, 0.5 * (plus + minus));
        theta.set(a, b, 0.5 * (plus - minus));
    }
    Ok(DAlembertVelocities { q_cap_dot, chi, theta })
}

/// Affine-affine Legendre map from `(q, q̇, χ̂, ϑ̂)` for
/// `T = (A/2)Tr(Ω̂²) + (B/2)(Tr Ω̂)²`:
/// `pₐ = A q̇ᵃ + B Σq̇`, `ρ̂ₐᵦ = 2A(ch x·v − u)`, `τ̂ₐᵦ = 2A(ch x·u − v)`.
pub fn legendre_affine(
    q: &[f64],
    q_dot: &[f64],
    chi: &SkewMatrix,
    theta: &SkewMatrix,
    a_const: f64,
    b_const: f64,
) -> Result<(Vec<f64>, SkewMatrix, SkewMatrix)> {
    let n = q.len();
    check_sizes(n, &[q_dot.len(), chi.dim(), theta.dim()])?;
    let total: f64 = q_dot.iter().sum();
    let p = q_dot.iter().map(|v| a_const * v + b_const * total).collect();
    let mut rho = SkewMatrix::zeros(n);
    let mut tau = SkewMatrix::zeros(n);
    for (a, b) in pairs(n) {
        let ch = (q[a] - q[b]).cosh();
        let u = chi.get(a, b);
        let v = theta.get(a, b);
        rho.set(a, b, 2.0 * a_const * (ch * v - u));
        tau.set(a, b, 2.0 * a_const * (ch * u - v));
    }
    Ok((p, rho, tau))
}
