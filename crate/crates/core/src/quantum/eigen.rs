use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::operator::ReducedOperator;

/// Relative gap below which eigenvalues are treated as one cluster.
pub const CLUSTER_TOL: f64 = 1e-9;

/// Lowest eigenpairs of a discretized operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// `‖Hψ − Eψ‖` in the operator's inner product.
    pub residuals: Vec<f64>,
    /// Largest eigenvalue magnitude of the whole operator.
    pub spectral_radius: f64,
    /// `max |⟨ψᵢ, ψⱼ⟩ − δᵢⱼ|` over the returned eigenvectors.
    pub gram_residual: f64,
    /// Eigenvectors as columns, normalized in the operator's inner product.
    pub eigenvectors: Option<DMatrix<f64>>,
}

/// A distinct eigenvalue and how many returned eigenpairs share it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub multiplicity: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_relative_residual(&self) -> f64 {
        let scale = self.spectral_radius.max(f64::MIN_POSITIVE);
        self.residuals.iter().fold(0.0f64, |m, r| m.max(r / scale))
    }

    /// Groups eigenvalues closer than `tol·max(1, |E|)`.
    pub fn levels(&self, tol: f64) -> Vec<Level> {
        let mut out: Vec<Level> = Vec::new();
        for &e in &self.eigenvalues {
            match out.last_mut() {
                Some(l) if (e - l.energy).abs() <= tol * l.energy.abs().max(1.0) => l.multiplicity += 1,
                _ => out.push(Level { energy: e, multiplicity: 1 }),
            }
        }
        out
    }
}

fn canonical_sign(v: &mut [f64]) {
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12).copied() {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

/// Solves `H ψ = E ψ` for an operator that is self-adjoint under `⟨u, v⟩ = Σ wᵢ uᵢ vᵢ`.
fn solve_weighted(h: &DMatrix<f64>, w: &[f64], count: usize) -> Result<Spectrum> {
    let dim = h.nrows();
    if h.ncols() != dim || w.len() != dim {
        return Err(Error::ShapeMismatch("operator must be square and match its weights".into()));
    }
    if count == 0 || count > dim {
        return Err(Error::Domain(format!("requested {count} eigenpairs of a {dim}-dimensional operator")));
    }
    if h.iter().any(|v| !v.is_finite()) || w.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Domain("operator or weights are not finite and positive".into()));
    }
    let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    // S = W^{1/2} H W^{-1/2} is symmetric when H is W-self-adjoint
    let s = DMatrix::from_fn(dim, dim, |i, j| sw[i] * h[(i, j)] / sw[j]);
    let s = (&s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(s.clone(), 1e-15, 100_000)
        .ok_or_else(|| Error::ConvergenceFailure("symmetric QR iteration did not converge".into()))?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let spectral_radius = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut pairs: Vec<(f64, Vec<f64>)> = order
        .iter()
        .take(count)
        .map(|&i| {
            let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            canonical_sign(&mut v);
            (eig.eigenvalues[i], v)
        })
        .collect();
    // deterministic order inside degenerate clusters
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len()
            && (pairs[end].0 - pairs[start].0).abs() <= CLUSTER_TOL * pairs[start].0.abs().max(1.0)
        {
            end += 1;
        }
        pairs[start..end].sort_by(|a, b| lexicographic(&b.1, &a.1));
        start = end;
    }

    let mut eigenvalues = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    let mut vectors = DMatrix::<f64>::zeros(dim, count);
    for (c, (e, v)) in pairs.into_iter().enumerate() {
        let sv = DVector::from_vec(v);
        let r = (&s * &sv - &sv * e).norm();
        for i in 0..dim {
            vectors[(i, c)] = sv[i] / sw[i];
        }
        eigenvalues.push(e);
        residuals.push(r);
    }
    let mut gram_residual: f64 = 0.0;
    for a in 0..count {
        for b in 0..=a {
            let g: f64 = (0..dim).map(|i| w[i] * vectors[(i, a)] * vectors[(i, b)]).sum();
            let target = if a == b { 1.0 } else { 0.0 };
            gram_residual = gram_residual.max((g - target).abs());
        }
    }
    Ok(Spectrum { eigenvalues, residuals, spectral_radius, gram_residual, eigenvectors: Some(vectors) })
}

/// `count` lowest eigenpairs of a reduced Hamiltonian by a dense symmetric solve.
pub fn eigensolve(op: &ReducedOperator, count: usize) -> Result<Spectrum> {
    solve_weighted(&op.matrix, &op.unknown_weights(), count)
}

/// `count` lowest eigenpairs of a plain symmetric matrix (unit weights).
pub fn eigensolve_matrix(m: &DMatrix<f64>, count: usize) -> Result<Spectrum> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch("matrix must be square".into()));
    }
    let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    if (m - m.transpose()).iter().any(|v| v.abs() > 1e-12 * scale) {
        return Err(Error::Domain("matrix is not symmetric".into()));
    }
    solve_weighted(m, &vec![1.0; m.nrows()], count)
}

/// Eigenpair nearest to `shift` by inverse iteration with an LU factorization of `A − σI`.
pub fn shifted_inverse_iteration(
    a: &DMatrix<f64>,
    shift: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, DVector<f64>)> {
    let n = a.nrows();
    if a.ncols() != n || n == 0 {
        return Err(Error::ShapeMismatch("matrix must be square and non-empty".into()));
    }
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let mut sigma = shift;
    let lu = loop {
        let shifted = a - DMatrix::identity(n, n) * sigma;
        let lu = shifted.lu();
        if lu.is_invertible() {
            break lu;
        }
        sigma += 1e-10 * scale;
    };
    let mut v = DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.618_033_988_749_895).fract());
    v /= v.norm();
    for _ in 0..max_iter {
        let next = lu
            .solve(&v)
            .ok_or_else(|| Error::ConvergenceFailure("singular shifted matrix".into()))?;
        v = &next / next.norm();
        let lambda = v.dot(&(a * &v));
        if (a * &v - &v * lambda).norm() <= tol * scale {
            return Ok((lambda, v));
        }
    }
    Err(Error::ConvergenceFailure(format!("inverse iteration did not reach {tol:e} in {max_iter} steps")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::model::ModelSpec;
    use crate::phase::potential::PotentialSpec;
    use crate::quantum::operator::build_reduced_hamiltonian;
    use crate::quantum::problem::{Axis, LabelMode, Sector, SpectralProblem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0]));
        let s = eigensolve_matrix(&m, 2).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 3.0]);
        assert!(matches!(eigensolve_matrix(&m, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn dense_agrees_with_inverse_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = DMatrix::from_fn(200, 200, |_, _| rng.random_range(-1.0..1.0));
        let a = (&g + g.transpose()) * 0.5;
        let s = eigensolve_matrix(&a, 5).unwrap();
        assert!(s.max_relative_residual() < 1e-12);
        assert!(s.gram_residual < 1e-12);
        for (i, e) in s.eigenvalues.iter().enumerate() {
            let (lambda, v) = shifted_inverse_iteration(&a, e + 1e-3, 1e-13, 500).unwrap();
            assert!((lambda - e).abs() < 1e-9, "{lambda} vs {e}");
            let col = s.eigenvectors.as_ref().unwrap().column(i).into_owned();
            assert!((col.dot(&v).abs() - 1.0).abs() < 1e-8);
        }
    }

    fn box_problem(points: usize, width: f64) -> SpectralProblem {
        SpectralProblem::dilatation(
            3,
            ModelSpec::aff_aff(1.0, 0.5),
            PotentialSpec::none(),
            Axis::new(-0.5 * width, 0.5 * width, points),
        )
    }

    fn box_exact(k: usize, width: f64) -> f64 {
        let (a, b, n) = (1.0, 0.5, 3.0);
        (std::f64::consts::PI * k as f64 / width).powi(2) / (2.0 * n * (a + n * b))
    }

    #[test]
    fn box_spectrum() {
        let width = 1.5;
        let op = build_reduced_hamiltonian(&box_problem(512, width)).unwrap();
        let s = eigensolve(&op, 5).unwrap();
        assert!(s.max_relative_residual() < 1e-8 && s.gram_residual < 1e-8);
        for (k, e) in s.eigenvalues.iter().enumerate() {
            let exact = box_exact(k + 1, width);
            assert!((e - exact).abs() / exact < 1e-4, "{e} vs {exact}");
        }
        let coarse = eigensolve(&build_reduced_hamiltonian(&box_problem(256, width)).unwrap(), 3).unwrap();
        for k in 0..3 {
            let exact = box_exact(k + 1, width);
            let ratio = (coarse.eigenvalues[k] - exact).abs() / (s.eigenvalues[k] - exact).abs();
            assert!((3.2..=4.8).contains(&ratio), "{ratio}");
        }
    }

    #[test]
    fn angular_shift_is_uniform() {
        let model = ModelSpec::metr_aff(2.0, 1.0, 0.5);
        let base = SpectralProblem::dilatation(3, model.clone(), PotentialSpec::harmonic_well(4.0), Axis::new(-3.0, 3.0, 64));
        let s0 = eigensolve(&build_reduced_hamiltonian(&base).unwrap(), 5).unwrap();
        let op1 = build_reduced_hamiltonian(&base.clone().with_labels(1.0, 0.0, LabelMode::Integer)).unwrap();
        let s1 = eigensolve(&op1, 15).unwrap();
        let levels = s1.levels(1e-9);
        assert!(levels.iter().all(|l| l.multiplicity == 3));
        let expected = 1.0 / model.mu().unwrap();
        for (l, e0) in levels.iter().zip(&s0.eigenvalues) {
            assert!((l.energy - e0 - expected).abs() < 1e-10);
        }
        let v = s1.eigenvectors.as_ref().unwrap().column(0).iter().copied().collect::<Vec<_>>();
        let (rs, rj) = op1.casimir_residuals(&v).unwrap();
        assert!(rs < 1e-10 && rj < 1e-10);
    }

    #[test]
    fn raw_and_amended_converge_together() {
        let mut p = box_problem(200, 1.0);
        p.n = 2;
        p.sector = Sector::Shape;
        p.alpha = 1.0;
        p.beta = 2.0;
        p.grid = vec![Axis::new(0.0, 4.0, 200)];
        let amended = eigensolve(&build_reduced_hamiltonian(&p).unwrap(), 3).unwrap();
        p.use_amended_transform = false;
        let op = build_reduced_hamiltonian(&p).unwrap();
        let raw = eigensolve(&op, 3).unwrap();
        assert!(raw.gram_residual < 1e-8);
        for (a, r) in amended.eigenvalues.iter().zip(&raw.eigenvalues) {
            assert!((a - r).abs() / a.abs() < 1e-3, "{a} vs {r}");
        }
    }

    #[test]
    fn clusters_are_deterministic() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 1.0, 0.5]));
        let a = eigensolve_matrix(&m, 4).unwrap();
        let b = eigensolve_matrix(&m, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.levels(1e-12).iter().map(|l| l.multiplicity).collect::<Vec<_>>(), vec![1, 2, 1]);
    }
}
