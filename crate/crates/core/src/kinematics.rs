//! Configuration-space geometry of the internal motion: polar and two-polar
//! decompositions, Green/Cauchy deformation tensors and affine velocities.
//!
//! All metrics are the identity (orthonormal material and spatial frames), so
//! transposes and metric transposes coincide.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Smallest admissible ratio between the extreme singular values of `phi`.
pub const CONDITION_GUARD: f64 = 1e-12;

/// Below this spread of log invariants the spectrum is treated as totally
/// degenerate and the two-polar gauge is pinned to `R = I`.
const TOTAL_DEGENERACY: f64 = 1e-12;

/// Internal configuration `phi` plus an optional centre position.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    phi: Matrix,
    x: Option<Vector>,
}

impl Configuration {
    pub fn new(phi: Matrix) -> Result<Self> {
        check_configuration(&phi)?;
        Ok(Self { phi, x: None })
    }

    pub fn with_position(phi: Matrix, x: Vector) -> Result<Self> {
        check_configuration(&phi)?;
        if x.len() != phi.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "position has {} components, configuration is {}-dimensional",
                x.len(),
                phi.nrows()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularConfiguration("non-finite position".into()));
        }
        Ok(Self { phi, x: Some(x) })
    }

    pub fn dim(&self) -> usize {
        self.phi.nrows()
    }

    pub fn phi(&self) -> &Matrix {
        &self.phi
    }

    pub fn position(&self) -> Option<&Vector> {
        self.x.as_ref()
    }

    pub fn into_phi(self) -> Matrix {
        self.phi
    }
}

/// `phi = L · diag(exp q) · Rᵀ` with `L, R ∈ SO(n)` and `q` non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPolar {
    pub l: Matrix,
    pub r: Matrix,
    pub q: Vector,
}

impl TwoPolar {
    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Diagonal matrix of the deformation invariants `Qᵃ = exp(qᵃ)`.
    pub fn d(&self) -> Matrix {
        Matrix::from_diagonal(&self.q.map(f64::exp))
    }

    pub fn reconstruct(&self) -> Matrix {
        &self.l * self.d() * self.r.transpose()
    }

    pub fn degeneracy_margin(&self) -> f64 {
        degeneracy_margin(self.q.as_slice())
    }

    /// Re-gauges `self` by joint column sign flips of `L` and `R` so that its
    /// columns follow `reference` as closely as possible. Both factors stay in
    /// SO(n), so the number of flips is kept even.
    ///
    /// Only meaningful for non-degenerate spectra sharing the ordering of `reference`.
    pub fn align_to(&mut self, reference: &TwoPolar) {
        let n = self.dim();
        if reference.dim() != n {
            return;
        }
        let overlaps: Vec<f64> = (0..n)
            .map(|a| {
                self.l.column(a).dot(&reference.l.column(a))
                    + self.r.column(a).dot(&reference.r.column(a))
            })
            .collect();
        let mut flips: Vec<bool> = overlaps.iter().map(|o| *o < 0.0).collect();
        if flips.iter().filter(|f| **f).count() % 2 == 1 {
            // toggle the least decisive column to restore an even count
            let weakest = (0..n)
                .min_by(|&a, &b| overlaps[a].abs().total_cmp(&overlaps[b].abs()))
                .unwrap_or(0);
            flips[weakest] = !flips[weakest];
        }
        for (a, flip) in flips.into_iter().enumerate() {
            if flip {
                self.l.column_mut(a).neg_mut();
                self.r.column_mut(a).neg_mut();
            }
        }
    }
}

/// Result of `phi = U · A` with `U ∈ SO(n)` and `A` symmetric positive-definite.
#[derive(Debug, Clone, PartialEq)]
pub struct Polar {
    pub u: Matrix,
    pub a: Matrix,
}

impl Polar {
    /// Left-handed form `phi = B · U` with `B = U A U⁻¹`.
    pub fn b(&self) -> Matrix {
        &self.u * &self.a * self.u.transpose()
    }
}

/// Green and Cauchy tensors with the basic deformation invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationData {
    pub green: Matrix,
    pub cauchy: Matrix,
    /// `I_p = Tr(Gᵖ)` for `p = 1..n`.
    pub invariants: Vec<f64>,
}

impl DeformationData {
    /// Same invariants evaluated as `Tr(C⁻ᵖ)`.
    pub fn invariants_from_cauchy(&self) -> Result<Vec<f64>> {
        let c_inv = self
            .cauchy
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::SingularConfiguration("Cauchy tensor not invertible".into()))?;
        Ok(trace_powers(&c_inv, self.green.nrows()))
    }

    /// Lagrange deformation tensor `E = (G − I)/2`.
    pub fn lagrange(&self) -> Matrix {
        let n = self.green.nrows();
        (&self.green - Matrix::identity(n, n)) * 0.5
    }

    /// Euler deformation tensor `e = (I − C)/2`.
    pub fn euler(&self) -> Matrix {
        let n = self.cauchy.nrows();
        (Matrix::identity(n, n) - &self.cauchy) * 0.5
    }
}

/// Spatial and co-moving affine velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct InternalVelocity {
    /// `Ω = φ̇ φ⁻¹`
    pub omega: Matrix,
    /// `Ω̂ = φ⁻¹ φ̇`
    pub omega_hat: Matrix,
}

fn check_square(phi: &Matrix) -> Result<()> {
    if phi.nrows() != phi.ncols() || phi.nrows() == 0 {
        return Err(Error::ShapeMismatch(format!(
            "configuration must be a non-empty square matrix, got {}x{}",
            phi.nrows(),
            phi.ncols()
        )));
    }
    Ok(())
}

fn check_configuration(phi: &Matrix) -> Result<()> {
    check_square(phi)?;
    if phi.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularConfiguration("non-finite entries".into()));
    }
    let det = phi.determinant();
    if !(det > 0.0) {
        return Err(Error::SingularConfiguration(format!(
            "orientation-reversing or singular configuration (det = {det:e})"
        )));
    }
    Ok(())
}

fn trace_powers(m: &Matrix, count: usize) -> Vec<f64> {
    let mut power = m.clone();
    let mut out = Vec::with_capacity(count);
    for p in 0..count {
        if p > 0 {
            power = &power * m;
        }
        out.push(power.trace());
    }
    out
}

/// Two-polar (singular value) decomposition in the canonical gauge:
/// invariants sorted non-increasing, column signs normalised so that the
/// largest-magnitude entry of every column of `R` is positive, and one joint
/// column flip if needed to keep `det L = det R = +1`.
pub fn two_polar(phi: &Matrix) -> Result<TwoPolar> {
    check_configuration(phi)?;
    let n = phi.nrows();
    let (u, sigma, v_t) = svd(phi)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let largest = sigma[order[0]];
    let smallest = sigma[order[n - 1]];
    if !(smallest > CONDITION_GUARD * largest) {
        return Err(Error::SingularConfiguration(format!(
            "condition guard violated: smallest singular value {smallest:e}, largest {largest:e}"
        )));
    }

    let q = Vector::from_iterator(n, order.iter().map(|&k| sigma[k].ln()));

    if degeneracy_margin(q.as_slice()) < TOTAL_DEGENERACY && spread(q.as_slice()) < TOTAL_DEGENERACY {
        // D ∝ I: only L Rᵀ is meaningful; pin R = I and take L from the polar factor.
        let polar = polar_from_factors(&u, &v_t, &sigma);
        return Ok(TwoPolar { l: polar.u, r: Matrix::identity(n, n), q });
    }

    let mut l = Matrix::zeros(n, n);
    let mut r = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        l.set_column(dst, &u.column(src));
        r.set_column(dst, &v_t.row(src).transpose());
    }
    for a in 0..n {
        let col = r.column(a);
        let pivot = col.iamax();
        if col[pivot] < 0.0 {
            l.column_mut(a).neg_mut();
            r.column_mut(a).neg_mut();
        }
    }
    if r.determinant() < 0.0 {
        l.column_mut(n - 1).neg_mut();
        r.column_mut(n - 1).neg_mut();
    }
    Ok(TwoPolar { l, r, q })
}

fn spread(q: &[f64]) -> f64 {
    let max = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = q.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

fn polar_from_factors(
    u: &Matrix,
    v_t: &Matrix,
    sigma: &DVector<f64>,
) -> Polar {
    let rot = u * v_t;
    let a = v_t.transpose() * Matrix::from_diagonal(sigma) * v_t;
    let a = (&a + a.transpose()) * 0.5;
    Polar { u: rot, a }
}

/// Polar decomposition `phi = U · A`.
pub fn polar_decompose(phi: &Matrix) -> Result<Polar> {
    let tp = two_polar(phi)?;
    let u = &tp.l * tp.r.transpose();
    let a = &tp.r * tp.d() * tp.r.transpose();
    let a = (&a + a.transpose()) * 0.5;
    Ok(Polar { u, a })
}

/// Nearest rotation to an almost-orthogonal matrix (orthogonal polar factor).
pub fn project_to_rotation(m: &Matrix) -> Matrix {
    match svd(m) {
        Ok((u, _, v_t)) => u * v_t,
        Err(_) => m.clone(),
    }
}

/// Full SVD `m = U·diag(σ)·Vᵀ` of a square matrix, returned as `(U, σ, Vᵀ)`.
///
/// faer is used instead of nalgebra's bidiagonal QR, which loses accuracy (relative
/// reconstruction error up to ~1e−9) when two singular values nearly coincide.
pub fn svd(m: &Matrix) -> Result<(Matrix, Vector, Matrix)> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::ShapeMismatch("SVD expects a square matrix".into()));
    }
    let f = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    let dec = f
        .svd()
        .map_err(|e| Error::SingularConfiguration(format!("SVD did not converge: {e:?}")))?;
    let (u, v, s) = (dec.U(), dec.V(), dec.S().column_vector());
    Ok((
        Matrix::from_fn(n, n, |i, j| u[(i, j)]),
        Vector::from_fn(n, |i, _| s[i]),
        Matrix::from_fn(n, n, |i, j| v[(j, i)]),
    ))
}

pub fn deformation(phi: &Matrix) -> Result<DeformationData> {
    check_configuration(phi)?;
    let n = phi.nrows();
    let green = phi.transpose() * phi;
    let left = phi * phi.transpose();
    let cauchy = left
        .try_inverse()
        .ok_or_else(|| Error::SingularConfiguration("φφᵀ not invertible".into()))?;
    let cauchy = (&cauchy + cauchy.transpose()) * 0.5;
    let invariants = trace_powers(&green, n);
    Ok(DeformationData { green, cauchy, invariants })
}

pub fn affine_velocity(phi: &Matrix, phi_dot: &Matrix) -> Result<InternalVelocity> {
    check_configuration(phi)?;
    if phi_dot.shape() != phi.shape() {
        return Err(Error::ShapeMismatch("φ̇ must have the shape of φ".into()));
    }
    let inv = phi
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularConfiguration("φ not invertible".into()))?;
    Ok(InternalVelocity {
        omega: phi_dot * &inv,
        omega_hat: &inv * phi_dot,
    })
}

/// `min_{i≠j} |qⁱ − qʲ|`; zero flags a degenerate spectrum. Infinite for `n < 2`.
pub fn degeneracy_margin(q: &[f64]) -> f64 {
    let mut margin = f64::INFINITY;
    for i in 0..q.len() {
        for j in (i + 1)..q.len() {
            margin = margin.min((q[i] - q[j]).abs());
        }
    }
    margin
}

/// Relative Frobenius distance `‖a − b‖ / ‖b‖`.
pub fn relative_error(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).norm() / b.norm()
}

/// `‖MᵀM − I‖_F`.
pub fn orthogonality_residual(m: &Matrix) -> f64 {
    let n = m.ncols();
    (m.transpose() * m - Matrix::identity(n, n)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rot2(angle: f64) -> Matrix {
        Matrix::from_row_slice(2, 2, &[angle.cos(), -angle.sin(), angle.sin(), angle.cos()])
    }

    #[test]
    fn polar_of_identity() {
        let p = polar_decompose(&Matrix::identity(3, 3)).unwrap();
        assert_abs_diff_eq!(p.u, Matrix::identity(3, 3), epsilon = 1e-14);
        assert_abs_diff_eq!(p.a, Matrix::identity(3, 3), epsilon = 1e-14);
    }

    #[test]
    fn polar_of_positive_diagonal() {
        let phi = Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 0.5]));
        let p = polar_decompose(&phi).unwrap();
        assert_abs_diff_eq!(p.u, Matrix::identity(2, 2), epsilon = 1e-14);
        assert_abs_diff_eq!(p.a, phi, epsilon = 1e-14);
        assert_abs_diff_eq!(p.b(), phi, epsilon = 1e-14);
    }

    #[test]
    fn two_polar_diagonal_case() {
        let phi = Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 0.5]));
        let tp = two_polar(&phi).unwrap();
        assert_abs_diff_eq!(tp.l, Matrix::identity(2, 2), epsilon = 1e-14);
        assert_abs_diff_eq!(tp.r, Matrix::identity(2, 2), epsilon = 1e-14);
        assert_abs_diff_eq!(tp.q[0], 2f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(tp.q[1], -(2f64.ln()), epsilon = 1e-14);
    }

    #[test]
    fn two_polar_ascending_diagonal_is_sorted() {
        let phi = Matrix::from_diagonal(&Vector::from_vec(vec![0.5, 1.0, 3.0]));
        let tp = two_polar(&phi).unwrap();
        assert!(tp.q[0] >= tp.q[1] && tp.q[1] >= tp.q[2]);
        assert!(relative_error(&tp.reconstruct(), &phi) < 1e-14);
        assert_abs_diff_eq!(tp.l.determinant(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(tp.r.determinant(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn two_polar_isometry_pins_r() {
        let phi = rot2(std::f64::consts::FRAC_PI_2);
        let tp = two_polar(&phi).unwrap();
        assert_abs_diff_eq!(tp.q[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(tp.q[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(tp.r, Matrix::identity(2, 2), epsilon = 1e-14);
        assert_abs_diff_eq!(tp.l, phi, epsilon = 1e-12);
    }

    #[test]
    fn rejects_orientation_reversal_and_nan() {
        let flip = Matrix::from_diagonal(&Vector::from_vec(vec![1.0, -1.0]));
        assert!(matches!(two_polar(&flip), Err(Error::SingularConfiguration(_))));
        assert!(matches!(polar_decompose(&flip), Err(Error::SingularConfiguration(_))));
        let mut nan = Matrix::identity(2, 2);
        nan[(0, 1)] = f64::NAN;
        assert!(matches!(deformation(&nan), Err(Error::SingularConfiguration(_))));
        assert!(matches!(Configuration::new(nan), Err(Error::SingularConfiguration(_))));
    }

    #[test]
    fn condition_guard() {
        let phi = Matrix::from_diagonal(&Vector::from_vec(vec![1.0, 1e-13]));
        assert!(matches!(two_polar(&phi), Err(Error::SingularConfiguration(_))));
        let ok = Matrix::from_diagonal(&Vector::from_vec(vec![1.0, 1e-11]));
        assert!(two_polar(&ok).is_ok());
    }

    #[test]
    fn deformation_examples() {
        let d = deformation(&Matrix::identity(3, 3)).unwrap();
        assert_eq!(d.invariants, vec![3.0, 3.0, 3.0]);
        assert_abs_diff_eq!(d.cauchy, Matrix::identity(3, 3), epsilon = 1e-15);

        let phi = Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 1.0, 0.5]));
        let d = deformation(&phi).unwrap();
        assert_abs_diff_eq!(d.invariants[0], 5.25, epsilon = 1e-14);
        let from_c = d.invariants_from_cauchy().unwrap();
        for (a, b) in d.invariants.iter().zip(&from_c) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(d.lagrange()[(0, 0)], 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.euler()[(2, 2)], 0.5 * (1.0 - 4.0), epsilon = 1e-14);
    }

    #[test]
    fn affine_velocity_examples() {
        let phi = Matrix::from_row_slice(2, 2, &[2.0, 0.3, -0.1, 0.7]);
        let zero = Matrix::zeros(2, 2);
        let v = affine_velocity(&phi, &zero).unwrap();
        assert_eq!(v.omega, zero);
        assert_eq!(v.omega_hat, zero);

        let dot = Matrix::from_row_slice(2, 2, &[0.1, -0.4, 0.9, 0.2]);
        let v = affine_velocity(&Matrix::identity(2, 2), &dot).unwrap();
        assert_abs_diff_eq!(v.omega, dot, epsilon = 1e-15);
        assert_abs_diff_eq!(v.omega_hat, dot, epsilon = 1e-15);

        // isometric φ with φ̇ = Wφ, W skew → Ω = W
        let rot = rot2(0.7);
        let w = Matrix::from_row_slice(2, 2, &[0.0, -1.3, 1.3, 0.0]);
        let v = affine_velocity(&rot, &(&w * &rot)).unwrap();
        assert_abs_diff_eq!(v.omega, w, epsilon = 1e-14);
        let inv = rot.clone().try_inverse().unwrap();
        assert_abs_diff_eq!(v.omega_hat, &inv * &v.omega * &rot, epsilon = 1e-12);
    }

    #[test]
    fn degeneracy_margin_examples() {
        assert_eq!(degeneracy_margin(&[1.0, 0.0, -1.0]), 1.0);
        assert_eq!(degeneracy_margin(&[0.3, 0.3]), 0.0);
        let l2 = 2f64.ln();
        assert_abs_diff_eq!(degeneracy_margin(&[l2, 0.0, -l2]), l2, epsilon = 1e-15);
        assert!(degeneracy_margin(&[0.1]).is_infinite());
    }

    #[test]
    fn align_keeps_reconstruction() {
        let phi = Matrix::from_row_slice(3, 3, &[1.2, 0.3, -0.2, 0.1, 0.9, 0.4, -0.3, 0.2, 1.5]);
        let reference = two_polar(&phi).unwrap();
        let mut flipped = reference.clone();
        for a in [0usize, 2] {
            flipped.l.column_mut(a).neg_mut();
            flipped.r.column_mut(a).neg_mut();
        }
        flipped.align_to(&reference);
        assert_abs_diff_eq!(flipped.l, reference.l, epsilon = 1e-15);
        assert_abs_diff_eq!(flipped.r, reference.r, epsilon = 1e-15);
    }
}
