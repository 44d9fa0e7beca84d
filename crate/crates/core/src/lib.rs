//! Photon counting statistics of driven four-level atoms.
//!
//! The density matrix of the atom is generalised to a generating function
//! `G(s, t) = Σ_n σ⁽ⁿ⁾(t) sⁿ`, where `σ⁽ⁿ⁾` is the part of the state
//! conditioned on `n` photons having been emitted on the |3⟩,|4⟩ → |1⟩
//! channel. Its equation of motion is affine in the counting variable,
//! `dG/dt = (A₀ + s·A₁) G`, so factorial moments of the photon number
//! follow from `s`-derivatives at `s = 1` and photon-number probabilities
//! from the Taylor coefficients at `s = 0`.
//!
//! Crate layout:
//!
//! * [`model`] builds the double-Λ and N-type level schemes of ⁸⁷Rb.
//! * [`engine`] assembles the generator pair and integrates the
//!   generating function, its moment blocks and the `P_n` hierarchy.
//! * [`observables`] turns those into absorption line shapes, Mandel `Q`
//!   and parameter scans.
//! * [`oracle`] holds independent brute-force checks of the engine.
//!
//! All frequency-like quantities share one unit (MHz, read as μs⁻¹) and
//! times are in μs.

pub mod engine;
pub mod error;
pub mod model;
pub mod observables;
pub mod oracle;

pub use engine::{
    assemble_generators, evolve, evolve_factorial_moments, evolve_pn, GeneratorPair, GfState,
    MomentBlocks, MomentTrajectory, PnHierarchy, Tolerances,
};
pub use error::{Error, Result};
pub use oracle::{finite_difference_moments, hierarchy_consistency, null_space_steady_state};
pub use observables::{
    detuning_map_2d, line_shape_scan, map_2d, mandel_q, steady_emission_rate, Method,
    NumericOptions, QValue, ScanAxis, ScanParam, ScanResult,
};
pub use model::{
    build_double_lambda, build_n_type, gdc_cross, AtomModel, DecayRates, DoubleLambdaParams,
    DriveConfig, ModelKind, NTypeParams,
};


/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
