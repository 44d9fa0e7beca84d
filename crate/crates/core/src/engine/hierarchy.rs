use num_complex::Complex64 as C64;

use super::generator::GeneratorPair;
use super::integrate::{dopri5, initial_step, IntegrationStats, Tolerances};
use super::state::{flat_trace, GfState, StateVec, INITIAL_STATE_TOL, LEN};
use crate::error::{Error, Result};

/// Truncation deficit `1 − Σ P_n` above which `n_max` is reported as too
/// small for the evolution time.
pub const DEFICIT_WARN: f64 = 1e-3;

/// Photon-number resolved states `σ⁽⁰⁾ … σ⁽ⁿᵐᵃˣ⁾` at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct PnHierarchy {
    pub sigma: Vec<StateVec>,
    /// μs
    pub time: f64,
    /// `P_n = Σ_k σ⁽ⁿ⁾_kk`, with values in `[−tol, 0)` clamped to zero.
    pub probabilities: Vec<f64>,
    /// `1 − Σ_n P_n`: probability carried beyond `n_max`.
    pub deficit: f64,
    pub stats: IntegrationStats,
}

impl PnHierarchy {
    pub fn deficit_exceeds(&self, limit: f64) -> bool {
        self.deficit > limit
    }

    /// `Σ_n σ⁽ⁿ⁾`, equal to the `s = 1` state up to truncation.
    pub fn summed_state(&self) -> StateVec {
        self.sigma.iter().fold(StateVec::zeros(), |acc, s| acc + s)
    }

    /// `(Σ n·P_n, Σ n(n−1)·P_n)`
    pub fn factorial_moments(&self) -> (f64, f64) {
        self.probabilities
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(m1, m2), (n, &p)| {
                let n = n as f64;
                (m1 + n * p, m2 + n * (n - 1.0) * p)
            })
    }
}

/// Integrates `dσ⁽ⁿ⁾/dt = A₀σ⁽ⁿ⁾ + A₁σ⁽ⁿ⁻¹⁾` with `σ⁽⁰⁾(0) = g0` and
/// `σ⁽ⁿ⁾(0) = 0` for `n ≥ 1`, the Taylor coefficients of the generating
/// function around `s = 0`.
pub fn evolve_pn(
    gen: &GeneratorPair,
    g0: &GfState,
    t_final: f64,
    n_max: usize,
    tol: Tolerances,
) -> Result<PnHierarchy> {
    g0.check_initial(INITIAL_STATE_TOL)?;
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "final time must be finite and non-negative (got {t_final})"
        )));
    }
    let levels = n_max + 1;
    let mut y = vec![C64::new(0.0, 0.0); levels * LEN];
    y[..LEN].copy_from_slice(g0.to_flat().as_slice());
    let stats = if t_final > 0.0 {
        dopri5(
            |y, out| {
                for n in 0..levels {
                    let cur = &y[n * LEN..(n + 1) * LEN];
                    let o = &mut out[n * LEN..(n + 1) * LEN];
                    gen.apply_a0(cur, o);
                    if n > 0 {
                        gen.add_a1(1.0, &y[(n - 1) * LEN..n * LEN], o);
                    }
                }
            },
            &mut y,
            &[t_final],
            tol,
            initial_step(gen, t_final),
            |_, _| Ok(()),
        )?
    } else {
        IntegrationStats::default()
    };

    let sigma: Vec<StateVec> = y.chunks(LEN).map(StateVec::from_column_slice).collect();
    let eps = tol.rtol.max(tol.atol);
    let probabilities: Vec<f64> = sigma
        .iter()
        .map(|s| {
            let p = flat_trace(s.as_slice()).re;
            if p < 0.0 && p >= -eps {
                0.0
            } else {
                p
            }
        })
        .collect();
    let deficit = 1.0 - probabilities.iter().sum::<f64>();
    if deficit > DEFICIT_WARN {
        log::warn!(
            "photon-number hierarchy truncated at n_max = {n_max}: deficit {deficit:.3e} at t = {t_final} us"
        );
    }
    Ok(PnHierarchy {
        sigma,
        time: g0.time + t_final,
        probabilities,
        deficit,
        stats,
    })
}
