use crate::dynamics::eom::eom_flat;
use crate::dynamics::integrate::Trajectory;
use crate::error::{Error, Result};
use crate::kinematics::{orthogonality_residual, project_to_rotation, InternalVelocity, Matrix};
use crate::phase::hamiltonian::kinetic_with_gradient;
use crate::phase::model::{ModelKind, ModelSpec};
use crate::phase::potential::PotentialSpec;
use crate::phase::state::{ReducedState, SkewMatrix};

/// Reduced velocities `(q̇, χ̂, ϑ̂)` of a state: `χ̂ = ∂H/∂ρ̂`, `ϑ̂ = ∂H/∂τ̂`, `q̇ = ∂H/∂p`.
pub fn reduced_velocities(model: &ModelSpec, state: &ReducedState) -> Result<(Vec<f64>, SkewMatrix, SkewMatrix)> {
    let (_, grad) = kinetic_with_gradient(model, state)?;
    let chi = grad.d_rho();
    let theta = grad.d_tau();
    Ok((grad.dp, chi, theta))
}

/// Affine velocities of `φ = L·diag(exp q)·Rᵀ` predicted by the model:
/// `Ω = L(χ̂ + diag q̇ − Dϑ̂D⁻¹)Lᵀ`, `Ω̂ = R(D⁻¹χ̂D + diag q̇ − ϑ̂)Rᵀ`.
pub fn model_affine_velocity(
    model: &ModelSpec,
    state: &ReducedState,
    l: &Matrix,
    r: &Matrix,
) -> Result<InternalVelocity> {
    if model.kind == ModelKind::TrigUn {
        return Err(Error::Domain("affine velocities are real only for hyperbolic and d'Alembert models".into()));
    }
    let (q_dot, chi, theta) = reduced_velocities(model, state)?;
    let n = state.dim();
    let chi = chi.to_matrix();
    let theta = theta.to_matrix();
    let qd = Matrix::from_diagonal(&nalgebra::DVector::from_vec(q_dot));
    let d = Matrix::from_fn(n, n, |a, b| if a == b { state.q[a].exp() } else { 0.0 });
    let d_inv = Matrix::from_fn(n, n, |a, b| if a == b { (-state.q[a]).exp() } else { 0.0 });
    let spatial = &chi + &qd - &d * &theta * &d_inv;
    let material = &d_inv * &chi * &d + &qd - &theta;
    Ok(InternalVelocity {
        omega: l * spatial * l.transpose(),
        omega_hat: r * material * r.transpose(),
    })
}

fn check_rotation(m: &Matrix, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() || orthogonality_residual(m) > 1e-9 || (m.determinant() - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("{what} must be special orthogonal")));
    }
    Ok(())
}

/// Re-integrates `(z, L, R)` with `dL/dt = Lχ̂`, `dR/dt = Rϑ̂` between consecutive samples
/// (substeps no longer than `max_step`), re-projecting `L`, `R` onto SO(n) after each substep.
/// The reduced state is restarted from the stored sample at every interval.
pub fn reconstruct_attitudes(
    model: &ModelSpec,
    potential: &PotentialSpec,
    trajectory: &Trajectory,
    l0: &Matrix,
    r0: &Matrix,
    max_step: f64,
) -> Result<Trajectory> {
    let n = trajectory.dim();
    if l0.nrows() != n || r0.nrows() != n {
        return Err(Error::ShapeMismatch("initial attitudes must match the state dimension".into()));
    }
    check_rotation(l0, "L0")?;
    check_rotation(r0, "R0")?;
    if !(max_step > 0.0) {
        return Err(Error::Domain("max_step must be positive".into()));
    }
    let mut out = trajectory.clone();
    let mut attitudes = Vec::with_capacity(trajectory.len());
    let mut l = l0.clone();
    let mut r = r0.clone();
    attitudes.push((l.clone(), r.clone()));

    let field = |z: &[f64], l: &Matrix, r: &Matrix| -> Result<(Vec<f64>, Matrix, Matrix)> {
        let state = ReducedState::from_flat(n, z)?;
        let (_, chi, theta) = reduced_velocities(model, &state)?;
        Ok((eom_flat(model, potential, z, n)?, l * chi.to_matrix(), r * theta.to_matrix()))
    };

    for w in 0..trajectory.len().saturating_sub(1) {
        let span = trajectory.times[w + 1] - trajectory.times[w];
        let substeps = (span / max_step).ceil().max(1.0) as usize;
        let h = span / substeps as f64;
        let mut z = trajectory.states[w].to_flat();
        for _ in 0..substeps {
            let (k1z, k1l, k1r) = field(&z, &l, &r)?;
            let z2: Vec<f64> = z.iter().zip(&k1z).map(|(a, b)| a + 0.5 * h * b).collect();
            let (k2z, k2l, k2r) = field(&z2, &(&l + &k1l * (0.5 * h)), &(&r + &k1r * (0.5 * h)))?;
            let z3: Vec<f64> = z.iter().zip(&k2z).map(|(a, b)| a + 0.5 * h * b).collect();
            let (k3z, k3l, k3r) = field(&z3, &(&l + &k2l * (0.5 * h)), &(&r + &k2r * (0.5 * h)))?;
            let z4: Vec<f64> = z.iter().zip(&k3z).map(|(a, b)| a + h * b).collect();
            let (k4z, k4l, k4r) = field(&z4, &(&l + &k3l * h), &(&r + &k3r * h))?;
            for i in 0..z.len() {
                z[i] += h / 6.0 * (k1z[i] + 2.0 * k2z[i] + 2.0 * k3z[i] + k4z[i]);
            }
            l = project_to_rotation(&(&l + (k1l + k2l * 2.0 + k3l * 2.0 + k4l) * (h / 6.0)));
            r = project_to_rotation(&(&r + (k1r + k2r * 2.0 + k3r * 2.0 + k4r) * (h / 6.0)));
        }
        attitudes.push((l.clone(), r.clone()));
    }
    out.attitudes = Some(attitudes);
    Ok(out)
}
