use crate::error::Result;
use crate::kinematics::Matrix;
use crate::phase::bracket::LIE_POISSON_SIGN;
use crate::phase::hamiltonian::hamiltonian_with_gradient;
use crate::phase::model::ModelSpec;
use crate::phase::potential::PotentialSpec;
use crate::phase::state::{ReducedState, SkewMatrix};

/// Right-hand side of the reduced equations of motion, returned as a state-shaped
/// derivative: `q̇ = ∂H/∂p`, `ṗ = −∂H/∂q`, and the Lie-Poisson flow
/// `dρ̂/dt = [ρ̂, χ̂]`, `dτ̂/dt = [τ̂, ϑ̂]` with `χ̂ = ∂H/∂ρ̂`, `ϑ̂ = ∂H/∂τ̂`.
pub fn eom_rhs(model: &ModelSpec, potential: &PotentialSpec, state: &ReducedState) -> Result<ReducedState> {
    let (_, grad) = hamiltonian_with_gradient(model, potential, state)?;
    let chi = grad.d_rho().to_matrix();
    let theta = grad.d_tau().to_matrix();
    let rho = state.rho().to_matrix();
    let tau = state.tau().to_matrix();
    let d_rho: Matrix = (&chi * &rho - &rho * &chi) * LIE_POISSON_SIGN;
    let d_tau: Matrix = (&theta * &tau - &tau * &theta) * LIE_POISSON_SIGN;
    let d_rho = SkewMatrix::from_matrix(&d_rho, f64::INFINITY)?;
    let d_tau = SkewMatrix::from_matrix(&d_tau, f64::INFINITY)?;
    Ok(ReducedState {
        q: grad.dp.clone(),
        p: grad.dq.iter().map(|v| -v).collect(),
        m: d_rho.combine(&d_tau, -1.0, -1.0),
        n: d_rho.combine(&d_tau, 1.0, -1.0),
    })
}

/// Flat-coordinate form of [`eom_rhs`].
pub fn eom_flat(model: &ModelSpec, potential: &PotentialSpec, z: &[f64], n: usize) -> Result<Vec<f64>> {
    let state = ReducedState::from_flat(n, z)?;
    Ok(eom_rhs(model, potential, &state)?.to_flat())
}
