//! Fixed-step integration of state, transition-matrix, compound and
//! variational equations, and the analyses built on them.

mod floquet;
mod integrate;
pub mod ode;
mod subspace;
mod system;
mod variational;

pub use floquet::{floquet, return_map, FloquetOptions, FloquetResult, OrbitVerdict};
pub use integrate::{
    compound_transition, integrate, transition_matrix, transition_trajectory, DomainExit, DomainPolicy,
    IntegrationOptions, MatrixTrajectory, Trajectory, TransitionMatrix, DEFAULT_STEP, DOMAIN_TOL,
};
pub use subspace::{asymptotic_subspace, SubspaceReport, DECAY_THRESHOLD, DEFAULT_HORIZON};
pub use system::{FieldFn, JacobianFn, OracleFn, SystemBuilder, SystemModel, JACOBIAN_SELF_TEST_TOL};
pub use variational::{frame_from, simplex_point, variational_frame, volume_trace, ParallelotopeTrace, VariationalFrame};
