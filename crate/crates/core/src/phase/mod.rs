//! Reduced phase space `(q, p, M, N)`: models, Hamiltonians, Casimirs and
//! the Poisson structure.

pub mod bracket;
pub mod hamiltonian;
pub mod legendre;
pub mod model;
pub mod potential;
pub mod state;

pub use bracket::{poisson_bracket, poisson_tensor, Observable, LIE_POISSON_SIGN};
pub use hamiltonian::{
    casimir_csl2, casimir_csu2, gradient, hamiltonian, hamiltonian_with_gradient, model_casimir, wrap_angle,
    Gradient,
};
pub use legendre::{inverse_legendre_dalembert, legendre_affine, legendre_dalembert, DEGENERACY_TOL};
pub use model::{Coefficients, ModelKind, ModelSpec};
pub use potential::{Dilatational, Pairwise, PotentialSpec};
pub use state::{pair_count, pair_index, pairs, ReducedState, SkewMatrix};
