//! Randomized verification harnesses for the decomposition and the Poisson structure.

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{orthogonality_residual, relative_error, two_polar, Matrix};
use crate::phase::bracket::{jacobi_residual_linear, poisson_bracket, Observable};
use crate::phase::state::{pairs, ReducedState};

/// Pass threshold of [`check_brackets`].
pub const BRACKET_TOL: f64 = 1e-9;

/// Uniformly distributed rotation from the QR factorization of a Gaussian-like matrix.
pub fn random_rotation(rng: &mut impl Rng, n: usize) -> Matrix {
    loop {
        let g = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let qr = g.qr();
        let r = qr.r();
        if (0..n).any(|i| r[(i, i)].abs() < 1e-8) {
            continue;
        }
        let mut q = qr.q();
        for i in 0..n {
            if r[(i, i)] < 0.0 {
                q.column_mut(i).neg_mut();
            }
        }
        if q.determinant() < 0.0 {
            q.column_mut(0).neg_mut();
        }
        return q;
    }
}

/// Orientation-preserving `φ` with condition number at most `max_condition`.
/// Even draws are uniform entries, odd draws are `R₁ diag(eᵠ) R₂ᵀ` with log-uniform stretches.
pub fn random_configuration(rng: &mut impl Rng, n: usize, max_condition: f64, structured: bool) -> Matrix {
    let log_span = max_condition.ln();
    loop {
        let phi = if structured {
            let d = Matrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
                (rng.random_range(-0.5..0.5) * log_span).exp()
            }));
            random_rotation(rng, n) * d * random_rotation(rng, n).transpose()
        } else {
            let mut m = Matrix::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
            if m.determinant() < 0.0 {
                m.row_mut(0).neg_mut();
            }
            m
        };
        let s = phi.singular_values();
        let (hi, lo) = (s.max(), s.min());
        if lo > 0.0 && hi / lo <= max_condition {
            return phi;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub seed: u64,
    pub trials: usize,
    /// `max ‖L D Rᵀ − φ‖ / ‖φ‖`.
    pub reconstruction: f64,
    /// `max ‖LᵀL − I‖` over both factors.
    pub orthogonality: f64,
    /// `max |Qᵃ − sqrt(λᵃ(φᵀφ))| / Q¹`.
    pub singular_values: f64,
    pub passed: bool,
}

/// Decomposes `trials` random configurations of size 2 and 3 (alternating).
pub fn check_decomposition(seed: u64, trials: usize, max_condition: f64) -> Result<DecompositionReport> {
    if trials == 0 || !(max_condition >= 1.0) {
        return Err(Error::Domain("need trials ≥ 1 and max_condition ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report =
        DecompositionReport { seed, trials, reconstruction: 0.0, orthogonality: 0.0, singular_values: 0.0, passed: false };
    for k in 0..trials {
        let n = 2 + k % 2;
        let phi = random_configuration(&mut rng, n, max_condition, (k / 2) % 2 == 1);
        let tp = two_polar(&phi)?;
        report.reconstruction = report.reconstruction.max(relative_error(&tp.reconstruct(), &phi));
        report.orthogonality =
            report.orthogonality.max(orthogonality_residual(&tp.l)).max(orthogonality_residual(&tp.r));
        let mut oracle: Vec<f64> =
            SymmetricEigen::new(phi.transpose() * &phi).eigenvalues.iter().map(|v| v.max(0.0).sqrt()).collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        let scale = oracle[0];
        for (q, o) in tp.q.iter().zip(&oracle) {
            report.singular_values = report.singular_values.max((q.exp() - o).abs() / scale);
        }
    }
    report.passed = report.reconstruction < 1e-10 && report.orthogonality < 1e-12 && report.singular_values < 1e-9;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketReport {
    pub seed: u64,
    pub trials: usize,
    pub antisymmetry: f64,
    pub jacobi: f64,
    pub leibniz: f64,
    /// Largest residual among linear observables alone.
    pub linear: f64,
    /// `max |{ρ̂_ab, τ̂_cd}|`.
    pub rho_tau: f64,
    pub max_residual: f64,
    pub passed: bool,
}

fn random_state(rng: &mut impl Rng, n: usize) -> ReducedState {
    let z: Vec<f64> = (0..ReducedState::flat_len(n)).map(|_| rng.random_range(-2.0..2.0)).collect();
    ReducedState::from_flat(n, &z).expect("length matches")
}

fn linear(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..ReducedState::flat_len(n)).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn dot(c: &[f64], s: &ReducedState) -> f64 {
    c.iter().zip(s.to_flat()).map(|(a, b)| a * b).sum()
}

/// `sin(c·z)` or `exp(c·z/4)` with exact gradients.
fn nonlinear(c: Vec<f64>, kind: usize) -> Observable {
    let c2 = c.clone();
    if kind % 2 == 0 {
        Observable::smooth(
            "sin",
            move |s: &ReducedState| Ok(dot(&c, s).sin()),
            move |s: &ReducedState| {
                let d = dot(&c2, s).cos();
                Ok(c2.iter().map(|v| v * d).collect())
            },
        )
    } else {
        Observable::smooth(
            "exp",
            move |s: &ReducedState| Ok((0.25 * dot(&c, s)).exp()),
            move |s: &ReducedState| {
                let d = 0.25 * (0.25 * dot(&c2, s)).exp();
                Ok(c2.iter().map(|v| v * d).collect())
            },
        )
    }
}

/// Antisymmetry, Leibniz and Jacobi residuals over `trials` random observable triples at random
/// states with `n` cycling through 2, 3, 4. Residuals are relative to `1 + Σ|terms|`.
pub fn check_brackets(seed: u64, trials: usize) -> Result<BracketReport> {
    if trials == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = BracketReport {
        seed,
        trials,
        antisymmetry: 0.0,
        jacobi: 0.0,
        leibniz: 0.0,
        linear: 0.0,
        rho_tau: 0.0,
        max_residual: 0.0,
        passed: false,
    };
    for k in 0..trials {
        let n = 2 + k % 3;
        let s = random_state(&mut rng, n);
        let (cf, cg, ch) = (linear(&mut rng, n), linear(&mut rng, n), linear(&mut rng, n));

        let jac = jacobi_residual_linear(&cf, &cg, &ch, &s)?.abs();
        r.jacobi = r.jacobi.max(jac);
        r.linear = r.linear.max(jac);

        let lin = [Observable::Linear(cf.clone()), Observable::Linear(cg.clone()), Observable::Linear(ch.clone())];
        let non = [nonlinear(cf, k), nonlinear(cg, k + 1), Observable::product(lin[2].clone(), lin[0].clone())];
        for (set, is_linear) in [(&lin, true), (&non, false)] {
            let [f, g, h] = set;
            let fg = poisson_bracket(f, g, &s)?;
            let gf = poisson_bracket(g, f, &s)?;
            let anti = (fg + gf).abs() / (1.0 + fg.abs() + gf.abs());
            let prod = Observable::product(f.clone(), g.clone());
            let lhs = poisson_bracket(&prod, h, &s)?;
            let t1 = f.value(&s)? * poisson_bracket(g, h, &s)?;
            let t2 = g.value(&s)? * poisson_bracket(f, h, &s)?;
            let leib = (lhs - t1 - t2).abs() / (1.0 + lhs.abs() + t1.abs() + t2.abs());
            r.antisymmetry = r.antisymmetry.max(anti);
            r.leibniz = r.leibniz.max(leib);
            if is_linear {
                r.linear = r.linear.max(anti).max(leib);
            }
        }
        for (a, b) in pairs(n) {
            for (c, d) in pairs(n) {
                let v = poisson_bracket(&Observable::Rho(a, b), &Observable::Tau(c, d), &s)?;
                r.rho_tau = r.rho_tau.max(v.abs());
            }
        }
    }
    r.max_residual = r.antisymmetry.max(r.jacobi).max(r.leibniz).max(r.rho_tau);
    r.passed = r.max_residual < BRACKET_TOL;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotations_are_special_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [2, 3, 4] {
            let q = random_rotation(&mut rng, n);
            assert!(orthogonality_residual(&q) < 1e-13);
            assert!((q.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn configurations_respect_condition_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in 0..50 {
            let phi = random_configuration(&mut rng, 3, 1e6, k % 2 == 0);
            let s = phi.singular_values();
            assert!(s.max() / s.min() <= 1e6 && phi.determinant() > 0.0);
        }
    }

    #[test]
    fn single_linear_trial() {
        let r = check_brackets(0, 1).unwrap();
        assert!(r.linear < 1e-12, "{r:?}");
        assert_eq!(r.rho_tau, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn reports_are_reproducible() {
        assert_eq!(check_brackets(42, 12).unwrap(), check_brackets(42, 12).unwrap());
        assert_eq!(check_decomposition(42, 12, 1e6).unwrap(), check_decomposition(42, 12, 1e6).unwrap());
    }

    #[test]
    fn decomposition_small_run() {
        let r = check_decomposition(7, 40, 1e6).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(matches!(check_decomposition(7, 0, 1e6), Err(Error::Domain(_))));
    }
}
