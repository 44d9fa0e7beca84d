//! Generator assembly and time integration of the generating function.

mod generator;
mod hierarchy;
mod integrate;
mod moments;
mod propagator;
mod state;

pub use generator::{assemble_from_channels, assemble_generators, GeneratorPair};
pub use hierarchy::{evolve_pn, PnHierarchy, DEFICIT_WARN};
pub use integrate::{evolve, evolve_flat, IntegrationStats, Tolerances};
pub use moments::{evolve_factorial_moments, MomentBlocks, MomentTrajectory};
pub use propagator::MomentPropagator;
pub use state::{flat_index, GfState, StateVec, DIM, INITIAL_STATE_TOL, LEN};

pub(crate) use integrate::{dopri5, initial_step};
pub(crate) use moments::extended_rhs;
