use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase::model::{Coefficients, ModelKind};
use crate::quantum::grid::{Grid, NodeStatus};
use crate::quantum::measure::{amended_invariant_constant, amended_lebesgue_ratio};
use crate::quantum::problem::{angular_shift, Labels, Sector, SpectralProblem};
use crate::quantum::spin::{spin_matrices, CMatrix};

/// Discretized reduced Hamiltonian. Unknowns are ordered node-major; inside a node the
/// amplitude matrix `f` (rows `m'`, columns `k'`) is stacked column by column.
#[derive(Debug, Clone)]
pub struct ReducedOperator {
    pub matrix: DMatrix<f64>,
    pub grid: Grid,
    pub labels: Labels,
    /// Rows and columns of the amplitude matrix, `(2s+1, 2j+1)` or `(1, 1)`.
    pub rows: usize,
    pub cols: usize,
    /// `P` at each node for the raw weighted form, all ones in amended variables.
    pub node_weights: Vec<f64>,
    pub amended: bool,
    pub hbar: f64,
}

impl ReducedOperator {
    pub fn block(&self) -> usize {
        self.rows * self.cols
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Weight of every unknown in the discrete inner product
    /// `⟨u, v⟩ = (h^d / N(α)N(β)) Σ wₖ uₖ vₖ`.
    pub fn unknown_weights(&self) -> Vec<f64> {
        let scale = self.grid.cell_volume() / self.block() as f64;
        self.node_weights.iter().flat_map(|w| std::iter::repeat_n(w * scale, self.block())).collect()
    }

    /// `max |H − Hᵀ|`, exactly zero in amended variables.
    pub fn symmetry_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.transpose()))
    }

    /// `max |WH − (WH)ᵀ| / max |WH|` with `W` the inner-product weights.
    pub fn self_adjointness_residual(&self) -> f64 {
        let w = self.unknown_weights();
        let wh = DMatrix::from_fn(self.dim(), self.dim(), |i, j| w[i] * self.matrix[(i, j)]);
        let scale = max_abs(&wh);
        if scale == 0.0 {
            return 0.0;
        }
        max_abs(&(&wh - wh.transpose())) / scale
    }

    /// Splits a vector of unknowns into per-node amplitude matrices.
    pub fn amplitudes(&self, v: &[f64]) -> Result<Vec<CMatrix>> {
        if v.len() != self.dim() {
            return Err(Error::ShapeMismatch(format!("vector of length {} for {} unknowns", v.len(), self.dim())));
        }
        Ok(v.chunks(self.block())
            .map(|c| CMatrix::from_fn(self.rows, self.cols, |r, k| Complex64::new(c[r + k * self.rows], 0.0)))
            .collect())
    }

    /// `max ‖(‖S‖² − ħ²s(s+1))f‖` and the same for `‖V‖²`, with `‖S‖²` acting from the left
    /// and `‖V‖²` from the right on every node amplitude.
    pub fn casimir_residuals(&self, v: &[f64]) -> Result<(f64, f64)> {
        let Labels::Spin { s, j } = self.labels else {
            return Ok((0.0, 0.0));
        };
        let cs = spin_matrices(s, self.hbar).casimir_matrix();
        let cj = spin_matrices(j, self.hbar).casimir_matrix();
        let h2 = self.hbar * self.hbar;
        let mut out: (f64, f64) = (0.0, 0.0);
        for f in self.amplitudes(v)? {
            let left = &cs * &f - &f * Complex64::from(h2 * s.casimir());
            let right = &f * &cj - &f * Complex64::from(h2 * j.casimir());
            out.0 = out.0.max(left.norm());
            out.1 = out.1.max(right.norm());
        }
        Ok(out)
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Real parts of `(←S^β − →S^α)²` and `(←S^β + →S^α)²` for every pair `a < b`.
fn coupling_blocks(n: usize, labels: &Labels, hbar: f64) -> Result<Vec<(usize, usize, DMatrix<f64>, DMatrix<f64>)>> {
    let real = |m: CMatrix| -> Result<DMatrix<f64>> {
        if m.iter().any(|z| z.im.abs() > 1e-12 * (1.0 + z.norm())) {
            return Err(Error::Domain("angular coupling block is not real".into()));
        }
        Ok(m.map(|z| z.re))
    };
    match *labels {
        Labels::Fourier { alpha, beta } => {
            let m = hbar * (beta - alpha) as f64;
            let p = hbar * (beta + alpha) as f64;
            Ok(vec![(0, 1, DMatrix::from_element(1, 1, m * m), DMatrix::from_element(1, 1, p * p))])
        }
        Labels::Spin { s, j } => {
            let left = spin_matrices(j, hbar);
            let right = spin_matrices(s, hbar);
            let (ds, dj) = (s.multiplicity(), j.multiplicity());
            let id_s = CMatrix::identity(ds, ds);
            let id_j = CMatrix::identity(dj, dj);
            let mut out = Vec::new();
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                debug_assert!(n == 3);
                // vec(f G) = (Gᵀ ⊗ I) vec f,  vec(G f) = (I ⊗ G) vec f
                let from_right = kron(&left.pair_generator(a, b)?.transpose(), &id_s);
                let from_left = kron(&id_j, right.pair_generator(a, b)?);
                let minus = &from_right - &from_left;
                let plus = &from_right + &from_left;
                out.push((a, b, real(&minus * &minus)?, real(&plus * &plus)?));
            }
            Ok(out)
        }
    }
}

/// Assembles the reduced Hamiltonian of `problem` with 3-point central stencils.
///
/// Kinetic parts: `−ħ²κ_p ∂²/∂q̄²` (dilatation), `−ħ²κ_C P⁻¹∇·(P∇)` in orthonormal traceless
/// coordinates (shape), `−(ħ²/2I) P_ℓ⁻¹∇·(P_ℓ∇)` in `Q` (cartesian). In amended variables
/// `Φ = √P·Ψ` the weighted Laplacian becomes `∇² − Δ√P/√P`, which adds the constant
/// `ħ²κ_C n(n²−1)/3` (hyperbolic), `−ħ²κ_C n(n²−1)/3` (unitary), or the `Q`-dependent
/// d'Alembert analogue.
pub fn build_reduced_hamiltonian(problem: &SpectralProblem) -> Result<ReducedOperator> {
    let labels = problem.validate()?;
    let n = problem.n;
    let hbar = problem.model.hbar;
    let h2 = hbar * hbar;
    let coeffs = problem.coefficients()?;
    let trig = problem.model.kind == ModelKind::TrigUn;
    let shift = angular_shift(&problem.model, n, &labels)?;
    let blocks = if problem.sector == Sector::Dilatation { Vec::new() } else { coupling_blocks(n, &labels, hbar)? };
    let m_coupled = blocks.iter().any(|(_, _, m, _)| m.iter().any(|v| *v != 0.0));
    let n_coupled = blocks.iter().any(|(_, _, _, p)| p.iter().any(|v| *v != 0.0));

    let (kinetic, kappa_c) = match (problem.sector, coeffs) {
        (Sector::Dilatation, Coefficients::Invariant { kappa_p, kappa_c, .. }) => (h2 * kappa_p, kappa_c),
        (Sector::Shape, Coefficients::Invariant { kappa_c, .. }) => (h2 * kappa_c, kappa_c),
        (Sector::Cartesian, Coefficients::DAlembert { inertia }) => (h2 / (2.0 * inertia), 0.0),
        _ => return Err(Error::Domain("sector does not match the model".into())),
    };
    let inertia = match coeffs {
        Coefficients::DAlembert { inertia } => inertia,
        _ => 0.0,
    };

    let potential = &problem.potential;
    let sector = problem.sector;
    let node_potential = move |grid: &Grid, coords: &[f64]| -> f64 {
        let v = grid.invariants(coords);
        match sector {
            Sector::Dilatation => potential.dilatational_value(coords[0]),
            Sector::Shape => potential.value(&v) - potential.dilatational_value(0.0),
            Sector::Cartesian => potential.value(&v.iter().map(|x| x.ln()).collect::<Vec<_>>()),
        }
    };
    let grid = Grid::build(
        sector,
        n,
        problem.boundary(),
        &problem.grid,
        trig,
        |status| match status {
            NodeStatus::OnWall { m_wall, n_wall } if (m_wall && m_coupled) || (n_wall && n_coupled) => {
                Err(Error::SingularWeight("grid node on a coincidence with a nonvanishing coupling".into()))
            }
            _ => Ok(()),
        },
        |g, c| node_potential(g, c).is_finite(),
    )?;

    let amended = problem.use_amended_transform;
    let block = labels.block_size();
    let (rows, cols) = match labels {
        Labels::Fourier { .. } => (1, 1),
        Labels::Spin { s, j } => (s.multiplicity(), j.multiplicity()),
    };
    let dim = grid.len() * block;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let mut node_weights = vec![1.0; grid.len()];

    for k in 0..grid.len() {
        let coords = grid.nodes[k].clone();
        let v = grid.invariants(&coords);
        let mut scalar = node_potential(&grid, &coords) + shift;
        if sector != Sector::Dilatation {
            let p = grid.weight_at(&coords);
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::SingularWeight(format!("measure {p} at node {coords:?}")));
            }
            if amended {
                scalar += kinetic
                    * match sector {
                        Sector::Cartesian => amended_lebesgue_ratio(&v),
                        _ => amended_invariant_constant(n, if trig { -1.0 } else { 1.0 }),
                    };
            } else {
                node_weights[k] = p;
            }
        }
        let base = k * block;
        for l in 0..block {
            h[(base + l, base + l)] += scalar;
        }
        for (a, b, cm, cn) in &blocks {
            let (fm, fn_) = match sector {
                Sector::Cartesian => {
                    let (qa, qb) = (v[*a], v[*b]);
                    (0.25 / (inertia * (qa - qb).powi(2)), 0.25 / (inertia * (qa + qb).powi(2)))
                }
                _ => {
                    let half = 0.5 * (v[*a] - v[*b]);
                    let c = 0.125 * kappa_c;
                    if trig {
                        (c / half.sin().powi(2), c / half.cos().powi(2))
                    } else {
                        (c / half.sinh().powi(2), -c / half.cosh().powi(2))
                    }
                }
            };
            for r in 0..block {
                for s in 0..block {
                    h[(base + r, base + s)] += fm * cm[(r, s)] + fn_ * cn[(r, s)];
                }
            }
        }
        for axis in 0..grid.dim() {
            let step = grid.steps[axis];
            for dir in [-1i64, 1] {
                let neighbor = grid.neighbor(k, axis, dir);
                let coef = if amended || sector == Sector::Dilatation {
                    kinetic / (step * step)
                } else {
                    let mut mid = coords.clone();
                    mid[axis] += 0.5 * dir as f64 * step;
                    kinetic * grid.weight_at(&mid) / (node_weights[k] * step * step)
                };
                for l in 0..block {
                    h[(base + l, base + l)] += coef;
                    if let Some(m) = neighbor {
                        h[(base + l, m * block + l)] -= coef;
                    }
                }
            }
        }
    }
    Ok(ReducedOperator { matrix: h, grid, labels, rows, cols, node_weights, amended, hbar })
}
