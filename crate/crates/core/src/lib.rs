//! Classical and quantum reduced dynamics of affinely-rigid bodies.
//!
//! The internal configuration `φ` is split as `φ = L·diag(exp q)·Rᵀ`; the
//! invariant sector `(q, p, M, N)` evolves as a closed Hamiltonian system and,
//! after quantization, as a matrix-valued Schrödinger problem on the `q` grid.

pub mod checks;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod kinematics;
pub mod phase;
pub mod quantum;

pub use error::{Error, ErrorClass, Result};
