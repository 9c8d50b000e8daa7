//! Reduced equations of motion, integration, attitude reconstruction, exponential geodesics
//! and the planar classification.

pub mod attitude;
pub mod eom;
pub mod geodesic;
pub mod integrate;
pub mod planar;

pub use attitude::{model_affine_velocity, reconstruct_attitudes, reduced_velocities};
pub use eom::{eom_flat, eom_rhs};
pub use geodesic::{
    affine_state_from_velocity, geodesic_dual_route, geodesic_exponential, material_velocity, stationary_check,
    DualRouteReport, StationaryCheck, STATIONARY_TOL,
};
pub use integrate::{integrate, rk4_step, StepControl, Trajectory};
pub use planar::{
    classify_planar, classify_planar_with_energy, planar_effective_potential, planar_minimum, planar_period,
    planar_state, relative_coordinate, PlanarClassification, Verdict,
};
