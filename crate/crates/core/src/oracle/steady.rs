use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::engine::{flat_index, GeneratorPair, GfState, StateVec, DIM, LEN};
use crate::error::{Error, Result};

/// Singular values below this fraction of the largest one span the null
/// space of `A(1)`.
pub const NULL_SPACE_RTOL: f64 = 1e-10;

/// Stationary solution of `A(1)·σ = 0` with unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub sigma_ss: StateVec,
    /// `‖A(1)·σ_ss‖∞`
    pub residual: f64,
    /// `|Σ_k σ_kk − 1|`
    pub trace_error: f64,
    /// Numerical dimension of the null space of `A(1)`.
    pub null_dim: usize,
    /// Set when the null space is multi-dimensional and the state was
    /// selected by projecting the initial condition.
    pub degenerate: bool,
}

impl SteadyState {
    /// `Σ_k (A₁·σ_ss)_kk`: the stationary photon emission rate (counts/μs).
    pub fn emission_rate(&self, gen: &GeneratorPair) -> f64 {
        let mut out = [C64::new(0.0, 0.0); LEN];
        gen.add_a1(1.0, self.sigma_ss.as_slice(), &mut out);
        (0..DIM).map(|k| out[flat_index(k, k)]).sum::<C64>().re
    }

    pub fn populations(&self) -> [f64; DIM] {
        std::array::from_fn(|k| self.sigma_ss[flat_index(k, k)].re)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        GfState::from_flat(&self.sigma_ss, 0.0).hermiticity_defect()
    }
}

/// Steady state reached from the ground state |1⟩.
pub fn null_space_steady_state(gen: &GeneratorPair) -> Result<SteadyState> {
    null_space_steady_state_from(gen, &GfState::ground())
}

/// Solves `A(1)·σ = 0`, `tr σ = 1` by linear algebra alone.
///
/// With a one-dimensional null space one redundant row of `A(1)` (the `G₁₁`
/// row, which the trace identity makes dependent on the other diagonal
/// rows) is replaced by the trace constraint and the square system is
/// solved directly. With a degenerate null space (ideal dark states) the
/// state selected by `g0` is the spectral projection `R (Lᴴ R)⁻¹ Lᴴ g0`
/// onto the zero eigenspace, with `R`, `L` its right and left singular
/// vectors; this is the `t → ∞` limit of the evolution from `g0`.
pub fn null_space_steady_state_from(gen: &GeneratorPair, g0: &GfState) -> Result<SteadyState> {
    let a_s = gen.total(1.0);
    let a = DMatrix::<C64>::from_fn(LEN, LEN, |r, c| a_s[(r, c)]);
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let null: Vec<usize> = (0..LEN)
        .filter(|&k| sv[k] <= NULL_SPACE_RTOL * smax.max(f64::MIN_POSITIVE))
        .collect();

    let (sigma, degenerate) = if null.len() <= 1 {
        let mut b = a.clone();
        let pivot = flat_index(0, 0);
        for c in 0..LEN {
            b[(pivot, c)] = C64::new(0.0, 0.0);
        }
        for k in 0..DIM {
            b[(pivot, flat_index(k, k))] = C64::new(1.0, 0.0);
        }
        let mut rhs = DVector::<C64>::zeros(LEN);
        rhs[pivot] = C64::new(1.0, 0.0);
        let x = b.lu().solve(&rhs).ok_or(Error::RankDeficient)?;
        (x, false)
    } else {
        let u = svd.u.as_ref().expect("requested U");
        let v_t = svd.v_t.as_ref().expect("requested V^H");
        let k = null.len();
        let r = DMatrix::<C64>::from_fn(LEN, k, |i, j| v_t[(null[j], i)].conj());
        let l = DMatrix::<C64>::from_fn(LEN, k, |i, j| u[(i, null[j])]);
        let overlap = l.adjoint() * &r;
        let inv = overlap.try_inverse().ok_or(Error::RankDeficient)?;
        let g = DVector::<C64>::from_column_slice(g0.to_flat().as_slice());
        let mut x = &r * (inv * (l.adjoint() * g));
        let tr: C64 = (0..DIM).map(|k| x[flat_index(k, k)]).sum();
        if tr.norm() < 1e-8 {
            return Err(Error::RankDeficient);
        }
        x /= tr;
        (x, true)
    };

    let sigma_ss = StateVec::from_column_slice(sigma.as_slice());
    let res = a_s * sigma_ss;
    let residual = res.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tr: C64 = (0..DIM).map(|k| sigma_ss[flat_index(k, k)]).sum();
    Ok(SteadyState {
        sigma_ss,
        residual,
        trace_error: (tr - C64::new(1.0, 0.0)).norm(),
        null_dim: null.len(),
        degenerate,
    })
}
