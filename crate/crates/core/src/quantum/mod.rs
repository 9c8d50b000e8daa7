//! Reduced Schrödinger problem on the deformation invariants.

pub mod eigen;
pub mod grid;
pub mod inner;
pub mod measure;
pub mod operator;
pub mod problem;
pub mod spin;

pub use eigen::{eigensolve, eigensolve_matrix, shifted_inverse_iteration, Level, Spectrum};
pub use grid::Grid;
pub use inner::{inner_product, Weight};
pub use operator::{build_reduced_hamiltonian, ReducedOperator};
pub use problem::{angular_shift, Axis, Boundary, LabelMode, Labels, Sector, SpectralProblem};
pub use spin::{spin_matrices, SpinBlock, SpinLabel};
