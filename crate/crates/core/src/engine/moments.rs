use num_complex::Complex64 as C64;

use super::generator::GeneratorPair;
use super::integrate::{dopri5, initial_step, IntegrationStats, Tolerances};
use super::state::{flat_trace, GfState, StateVec, INITIAL_STATE_TOL, LEN};
use crate::error::Result;

/// The generating function at `s = 1` together with its first two
/// `s`-derivatives, all flattened.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentBlocks {
    pub g: StateVec,
    pub g1: StateVec,
    pub g2: StateVec,
}

impl MomentBlocks {
    /// Initial blocks: `g = g0`, vanishing derivatives.
    pub fn initial(g0: &GfState) -> Self {
        MomentBlocks {
            g: g0.to_flat(),
            g1: StateVec::zeros(),
            g2: StateVec::zeros(),
        }
    }

    /// `Y(1, t)`, the total probability.
    pub fn y(&self) -> C64 {
        flat_trace(self.g.as_slice())
    }

    /// `⟨N⁽¹⁾⟩ = Σ_k (g1)_kk`
    pub fn n1(&self) -> C64 {
        flat_trace(self.g1.as_slice())
    }

    /// `⟨N⁽²⁾⟩ = Σ_k (g2)_kk`
    pub fn n2(&self) -> C64 {
        flat_trace(self.g2.as_slice())
    }

    /// Mandel `Q = (⟨N⁽²⁾⟩ − ⟨N⁽¹⁾⟩²)/⟨N⁽¹⁾⟩`; `None` without counts.
    pub fn mandel_q(&self) -> Option<f64> {
        mandel_q_from(self.n1().re, self.n2().re)
    }

    pub(crate) fn to_vec(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(3 * LEN);
        v.extend_from_slice(self.g.as_slice());
        v.extend_from_slice(self.g1.as_slice());
        v.extend_from_slice(self.g2.as_slice());
        v
    }

    pub(crate) fn from_slice(y: &[C64]) -> Self {
        MomentBlocks {
            g: StateVec::from_column_slice(&y[..LEN]),
            g1: StateVec::from_column_slice(&y[LEN..2 * LEN]),
            g2: StateVec::from_column_slice(&y[2 * LEN..3 * LEN]),
        }
    }
}

pub(crate) fn mandel_q_from(n1: f64, n2: f64) -> Option<f64> {
    if n1 > 0.0 && n1.is_finite() && n2.is_finite() {
        Some((n2 - n1 * n1) / n1)
    } else {
        None
    }
}

/// Time series of the working generating function and the first two
/// factorial moments of the emitted photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTrajectory {
    pub times: Vec<f64>,
    /// `Re Y(1, t)`
    pub y: Vec<f64>,
    pub n1: Vec<f64>,
    pub n2: Vec<f64>,
    /// Largest imaginary part seen in `Y`, `⟨N⁽¹⁾⟩` or `⟨N⁽²⁾⟩`.
    pub max_imag: f64,
    /// Blocks at the last sample time.
    pub last: MomentBlocks,
    pub stats: IntegrationStats,
}

impl MomentTrajectory {
    pub fn mandel_q(&self, k: usize) -> Option<f64> {
        mandel_q_from(self.n1[k], self.n2[k])
    }
}

/// `d/dt [g, g1, g2] = [A g, A₁g + A g1, 2A₁g1 + A g2]` with `A = A(1)`:
/// the `s`-derivatives of `dG/dt = (A₀ + sA₁)G` at `s = 1`.
pub(crate) fn extended_rhs(gen: &GeneratorPair, y: &[C64], out: &mut [C64]) {
    let (g, rest) = y.split_at(LEN);
    let (g1, g2) = rest.split_at(LEN);
    let (o, rest) = out.split_at_mut(LEN);
    let (o1, o2) = rest.split_at_mut(LEN);
    gen.apply(1.0, g, o);
    gen.apply(1.0, g1, o1);
    gen.add_a1(1.0, g, o1);
    gen.apply(1.0, g2, o2);
    gen.add_a1(2.0, g1, o2);
}

/// Integrates the moment blocks from `g0` and samples them at `times`
/// (non-decreasing, starting at or after 0).
pub fn evolve_factorial_moments(
    gen: &GeneratorPair,
    g0: &GfState,
    times: &[f64],
    tol: Tolerances,
) -> Result<MomentTrajectory> {
    g0.check_initial(INITIAL_STATE_TOL)?;
    let mut y = MomentBlocks::initial(g0).to_vec();
    let n = times.len();
    let mut traj = MomentTrajectory {
        times: times.to_vec(),
        y: Vec::with_capacity(n),
        n1: Vec::with_capacity(n),
        n2: Vec::with_capacity(n),
        max_imag: 0.0,
        last: MomentBlocks::initial(g0),
        stats: IntegrationStats::default(),
    };
    let span = times.last().copied().unwrap_or(0.0);
    let stats = dopri5(
        |y, out| extended_rhs(gen, y, out),
        &mut y,
        times,
        tol,
        initial_step(gen, span),
        |_, y| {
            let yy = flat_trace(&y[..LEN]);
            let n1 = flat_trace(&y[LEN..2 * LEN]);
            let n2 = flat_trace(&y[2 * LEN..]);
            traj.max_imag = traj.max_imag.max(yy.im.abs()).max(n1.im.abs()).max(n2.im.abs());
            traj.y.push(yy.re);
            traj.n1.push(n1.re);
            traj.n2.push(n2.re);
            Ok(())
        },
    )?;
    traj.last = MomentBlocks::from_slice(&y);
    traj.stats = stats;
    Ok(traj)
}
