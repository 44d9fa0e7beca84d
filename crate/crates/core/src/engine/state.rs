use nalgebra::{SMatrix, SVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Number of atomic levels.
pub const DIM: usize = 4;
/// Length of a flattened 4×4 state.
pub const LEN: usize = DIM * DIM;

/// Tolerance on the Hermiticity defect and trace error accepted for an
/// initial state; loose enough to restart from a previous integration.
pub const INITIAL_STATE_TOL: f64 = 1e-7;

/// Column-major flattening of a 4×4 generating-function matrix.
pub type StateVec = SVector<C64, LEN>;

/// Position of element `G_ij` (0-based) in the column-major flattening.
#[inline]
pub const fn flat_index(i: usize, j: usize) -> usize {
    i + DIM * j
}

/// Generating-function matrix `G_ij(s, t)` at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct GfState {
    pub entries: SMatrix<C64, DIM, DIM>,
    /// μs
    pub time: f64,
}

impl GfState {
    /// Pure state |level⟩⟨level| with `level` in `1..=4`.
    pub fn pure(level: usize) -> Result<Self> {
        if !(1..=DIM).contains(&level) {
            return Err(Error::InvalidLevel(level));
        }
        let mut entries = SMatrix::<C64, DIM, DIM>::zeros();
        entries[(level - 1, level - 1)] = C64::new(1.0, 0.0);
        Ok(GfState { entries, time: 0.0 })
    }

    /// The ground state |1⟩, the initial condition of every run.
    pub fn ground() -> Self {
        GfState::pure(1).expect("level 1 exists")
    }

    pub fn from_flat(v: &StateVec, time: f64) -> Self {
        GfState {
            entries: SMatrix::<C64, DIM, DIM>::from_column_slice(v.as_slice()),
            time,
        }
    }

    pub fn to_flat(&self) -> StateVec {
        StateVec::from_column_slice(self.entries.as_slice())
    }

    /// `Y = Σ_k G_kk`.
    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(self.entries.as_slice())
    }

    /// Real parts of the diagonal.
    pub fn populations(&self) -> [f64; DIM] {
        std::array::from_fn(|k| self.entries[(k, k)].re)
    }

    /// Checks the preconditions of an initial state: Hermitian, unit trace.
    pub fn check_initial(&self, tol: f64) -> Result<()> {
        let defect = self.hermiticity_defect();
        if !(defect <= tol) {
            return Err(Error::InvalidArgument(format!(
                "initial state is not Hermitian (defect {defect:e})"
            )));
        }
        let tr = self.trace();
        if !((tr - C64::new(1.0, 0.0)).norm() <= tol) {
            return Err(Error::InvalidArgument(format!(
                "initial state trace is {tr}, expected 1"
            )));
        }
        Ok(())
    }
}

/// `max_ij |G_ij − conj(G_ji)|` of a flattened state.
pub(crate) fn hermiticity_defect(g: &[C64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..DIM {
        for j in i..DIM {
            let d = (g[flat_index(i, j)] - g[flat_index(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// `Σ_k g_kk` of a flattened state.
#[inline]
pub(crate) fn flat_trace(g: &[C64]) -> C64 {
    (0..DIM).map(|k| g[flat_index(k, k)]).sum()
}
