use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::engine::{flat_index, GeneratorPair, GfState, DIM, INITIAL_STATE_TOL, LEN};
use crate::error::{Error, Result};

/// Stencil step balancing truncation against roundoff for states of
/// magnitude at most one.
pub const DEFAULT_STENCIL_STEP: f64 = 1e-4;

/// `Y(s, T) = tr exp(A(s)·T)·g0`, evaluated with a dense matrix exponential.
pub fn working_generating_function(
    gen: &GeneratorPair,
    g0: &GfState,
    s: f64,
    t: f64,
) -> C64 {
    let a = gen.total(s);
    let m = DMatrix::<C64>::from_fn(LEN, LEN, |r, c| a[(r, c)] * t);
    let g = DVector::<C64>::from_column_slice(g0.to_flat().as_slice());
    let out = m.exp() * g;
    (0..DIM).map(|k| out[flat_index(k, k)]).sum()
}

/// Factorial moments `(⟨N⁽¹⁾⟩, ⟨N⁽²⁾⟩)` at time `t` from finite differences
/// of `Y(s, t)` around `s = 1`: a central three-point stencil for the first
/// derivative and a five-point stencil for the second.
///
/// Shares no code with the auxiliary-block moment integration.
pub fn finite_difference_moments(
    gen: &GeneratorPair,
    g0: &GfState,
    t: f64,
    h: f64,
) -> Result<(f64, f64)> {
    if !(1e-6..=1e-2).contains(&h) {
        return Err(Error::InvalidArgument(format!(
            "stencil step must lie in [1e-6, 1e-2] (got {h})"
        )));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "final time must be finite and non-negative (got {t})"
        )));
    }
    g0.check_initial(INITIAL_STATE_TOL)?;
    let y = |k: f64| working_generating_function(gen, g0, 1.0 + k * h, t).re;
    let (m2, m1, c, p1, p2) = (y(-2.0), y(-1.0), y(0.0), y(1.0), y(2.0));
    let n1 = (p1 - m1) / (2.0 * h);
    let n2 = (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h);
    if !n1.is_finite() || !n2.is_finite() {
        return Err(Error::NonFiniteState { t });
    }
    Ok((n1, n2))
}
