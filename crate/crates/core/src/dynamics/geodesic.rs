use crate::dynamics::integrate::{integrate, StepControl};
use crate::error::{Error, Result};
use crate::kinematics::{two_polar, Configuration, Matrix, TwoPolar};
use crate::phase::legendre::legendre_affine;
use crate::phase::model::{ModelKind, ModelSpec};
use crate::phase::potential::PotentialSpec;
use crate::phase::state::{pairs, ReducedState, SkewMatrix};

pub const STATIONARY_TOL: f64 = 1e-10;

fn check_square(m: &Matrix, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch(format!("{what} must be square")));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("{what} has non-finite entries")));
    }
    Ok(())
}

/// `φ(t) = exp(Ωt)·φ₀`.
pub fn geodesic_exponential(phi0: &Matrix, omega: &Matrix, t: f64) -> Result<Configuration> {
    check_square(omega, "Omega")?;
    if omega.nrows() != phi0.nrows() {
        return Err(Error::ShapeMismatch("Omega and phi0 differ in size".into()));
    }
    if !t.is_finite() {
        return Err(Error::Domain("time must be finite".into()));
    }
    let phi0 = Configuration::new(phi0.clone())?;
    let e = (omega * t).exp();
    Configuration::new(e * phi0.phi())
}

/// Material velocity `Ω̂ = φ⁻¹Ωφ`.
pub fn material_velocity(phi: &Matrix, omega: &Matrix) -> Result<Matrix> {
    let inv = phi
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularConfiguration("phi is not invertible".into()))?;
    Ok(inv * omega * phi)
}

/// Reduced AffAff state of the configuration `φ` moving with spatial velocity `Ω`.
/// When `reference` is given the two-polar gauge is aligned to it.
pub fn affine_state_from_velocity(
    phi: &Matrix,
    omega: &Matrix,
    a_const: f64,
    b_const: f64,
    reference: Option<&TwoPolar>,
) -> Result<(ReducedState, TwoPolar)> {
    check_square(omega, "Omega")?;
    let mut tp = two_polar(phi)?;
    if let Some(r) = reference {
        tp.align_to(r);
    }
    let n = tp.dim();
    // W = Rᵀ Ω̂ R = D⁻¹χ̂D + diag q̇ − ϑ̂
    let w = tp.r.transpose() * material_velocity(phi, omega)? * &tp.r;
    let q: Vec<f64> = tp.q.iter().copied().collect();
    let q_dot: Vec<f64> = (0..n).map(|a| w[(a, a)]).collect();
    let mut chi = SkewMatrix::zeros(n);
    let mut theta = SkewMatrix::zeros(n);
    for (a, b) in pairs(n) {
        let x = q[a] - q[b];
        let sh = x.sinh();
        if sh.abs() < 1e-9 {
            return Err(Error::DegenerateInertia(format!(
                "coincident invariants q{} = q{}; two-polar gauge is not unique",
                a + 1,
                b + 1
            )));
        }
        let u = -(w[(a, b)] + w[(b, a)]) / (2.0 * sh);
        let v = (-x).exp() * u - w[(a, b)];
        chi.set(a, b, u);
        theta.set(a, b, v);
    }
    let (p, rho, tau) = legendre_affine(&q, &q_dot, &chi, &theta, a_const, b_const)?;
    Ok((ReducedState::from_rho_tau(q, p, &rho, &tau)?, tp))
}

/// Outcome of comparing the exponential geodesic with direct integration of the AffAff model.
#[derive(Debug, Clone)]
pub struct DualRouteReport {
    pub times: Vec<f64>,
    pub max_error: f64,
    pub initial: ReducedState,
}

/// Samples `exp(Ωt)φ₀` at `samples + 1` equispaced times on `[0, t_end]`, extracts the reduced
/// state at each, and compares it componentwise with RK4 integration of the geodetic AffAff model.
pub fn geodesic_dual_route(
    phi0: &Matrix,
    omega: &Matrix,
    model: &ModelSpec,
    t_end: f64,
    samples: usize,
    step: f64,
) -> Result<DualRouteReport> {
    if model.kind != ModelKind::AffAff {
        return Err(Error::Domain("the exponential geodesic corresponds to the AffAff model".into()));
    }
    if samples == 0 || !(t_end > 0.0) {
        return Err(Error::Domain("need t_end > 0 and at least one sample".into()));
    }
    let (Some(a), Some(b)) = (model.a_const, model.b_const) else {
        return Err(Error::Domain("AffAff model requires A and B".into()));
    };
    let (initial, mut gauge) = affine_state_from_velocity(phi0, omega, a, b, None)?;
    let dt = t_end / samples as f64;
    let per_sample = (dt / step).ceil().max(1.0) as usize;
    let control = StepControl::Rk4 { step: dt / per_sample as f64, record_every: per_sample };
    let traj = integrate(model, &PotentialSpec::none(), &initial, t_end, &control)?;
    if traj.len() != samples + 1 {
        return Err(Error::ShapeMismatch("unexpected sample count from integrator".into()));
    }
    let mut max_error: f64 = 0.0;
    for (k, state) in traj.states.iter().enumerate() {
        let t = traj.times[k];
        let phi = geodesic_exponential(phi0, omega, t)?.into_phi();
        let (extracted, tp) = affine_state_from_velocity(&phi, omega, a, b, Some(&gauge))?;
        gauge = tp;
        for (x, y) in extracted.to_flat().iter().zip(state.to_flat()) {
            max_error = max_error.max((x - y).abs());
        }
    }
    Ok(DualRouteReport { times: traj.times, max_error, initial })
}

/// `‖[X, Xᵀ]‖_F` and whether it vanishes within [`STATIONARY_TOL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryCheck {
    pub stationary: bool,
    pub residual: f64,
}

/// Normality test for stationary rotations: AffMetr expects `X = Ω̂`, MetrAff expects `X = Ω`.
/// The test itself is identical; `kind` only documents which velocity was passed.
pub fn stationary_check(x: &Matrix, kind: ModelKind) -> Result<StationaryCheck> {
    let _ = kind;
    check_square(x, "velocity")?;
    let xt = x.transpose();
    let residual = (x * &xt - &xt * x).norm();
    Ok(StationaryCheck { stationary: residual < STATIONARY_TOL, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    #[test]
    fn zero_velocity_is_static() {
        let phi0 = m(&[&[2.0, 0.3], &[0.1, 1.0]]);
        for t in [0.0, 1.0, 7.5] {
            let phi = geodesic_exponential(&phi0, &Matrix::zeros(2, 2), t).unwrap();
            assert_eq!(phi.phi(), &phi0);
        }
    }

    #[test]
    fn planar_rotation() {
        let w = 0.7;
        let omega = m(&[&[0.0, -w], &[w, 0.0]]);
        let t = 1.3;
        let phi = geodesic_exponential(&Matrix::identity(2, 2), &omega, t).unwrap();
        let (c, s) = ((w * t).cos(), (w * t).sin());
        let expected = m(&[&[c, -s], &[s, c]]);
        assert!((phi.phi() - expected).norm() < 1e-14);
    }

    #[test]
    fn matches_taylor_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let omega = Matrix::from_fn(3, 3, |_, _| rng.random_range(-0.3..0.3));
            let phi = geodesic_exponential(&Matrix::identity(3, 3), &omega, 1.0).unwrap();
            let mut term = Matrix::identity(3, 3);
            let mut sum = Matrix::identity(3, 3);
            for k in 1..30 {
                term = &term * &omega / k as f64;
                sum += &term;
            }
            assert!((phi.phi() - sum).norm() < 1e-13);
        }
    }

    #[test]
    fn material_velocity_relation_at_start() {
        let phi0 = m(&[&[1.5, 0.2, 0.0], &[0.0, 1.0, 0.4], &[0.1, 0.0, 0.7]]);
        let omega = m(&[&[0.1, 0.2, 0.0], &[-0.3, 0.0, 0.5], &[0.2, 0.1, -0.1]]);
        let h = 1e-6;
        let up = geodesic_exponential(&phi0, &omega, h).unwrap().into_phi();
        let dn = geodesic_exponential(&phi0, &omega, -h).unwrap().into_phi();
        let phi_dot = (up - dn) / (2.0 * h);
        let inv = phi0.clone().try_inverse().unwrap();
        let hat = material_velocity(&phi0, &omega).unwrap();
        assert!((inv * phi_dot - hat).norm() < 1e-8);
    }

    #[test]
    fn dual_route_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let model = ModelSpec::aff_aff(1.0, 0.5);
        let phi0 = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 1.0, 0.5]));
        let omega = Matrix::from_fn(3, 3, |_, _| rng.random_range(-0.3..0.3));
        let report = geodesic_dual_route(&phi0, &omega, &model, 1.0, 20, 1e-3).unwrap();
        assert!(report.max_error < 1e-6, "{}", report.max_error);
    }

    #[test]
    fn stationary_examples() {
        let skew = m(&[&[0.0, -1.0], &[1.0, 0.0]]);
        assert!(stationary_check(&skew, ModelKind::MetrAff).unwrap().stationary);
        let sym = m(&[&[1.0, 2.0], &[2.0, -3.0]]);
        assert!(stationary_check(&sym, ModelKind::AffMetr).unwrap().stationary);
        let nil = m(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let c = stationary_check(&nil, ModelKind::MetrAff).unwrap();
        assert!(!c.stationary);
        assert!((c.residual - 2f64.sqrt()).abs() < 1e-15);
    }
}
