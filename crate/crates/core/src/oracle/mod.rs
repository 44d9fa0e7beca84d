//! Brute-force cross-checks, each computed by a route independent of the
//! engine path it validates.

mod consistency;
mod fd;
mod steady;

pub use consistency::{
    hierarchy_consistency, ConsistencyReport, DEFICIT_SKIP, MOMENT_RTOL, STATE_TOL,
};
pub use fd::{finite_difference_moments, working_generating_function, DEFAULT_STENCIL_STEP};
pub use steady::{null_space_steady_state, null_space_steady_state_from, SteadyState, NULL_SPACE_RTOL};
