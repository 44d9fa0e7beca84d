//! Adaptive Dormand–Prince 5(4) integration of autonomous linear systems.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::generator::GeneratorPair;
use super::state::{GfState, StateVec, INITIAL_STATE_TOL, LEN};
use crate::error::{Error, Result};

/// Mixed error tolerance; a step is accepted when the RMS of
/// `err_i / (atol + rtol·|y_i|)` is at most one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-9,
            atol: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn new(rtol: f64, atol: f64) -> Result<Self> {
        let t = Tolerances { rtol, atol };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rtol > 0.0 && self.atol > 0.0 && self.rtol.is_finite() && self.atol.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "tolerances must be positive (rtol = {}, atol = {})",
                self.rtol, self.atol
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
}

impl IntegrationStats {
    pub fn merge(&mut self, other: IntegrationStats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
    }
}

const MAX_STEPS: usize = 200_000_000;

// Dormand–Prince tableau. Stage times are not needed: every system
// integrated here is autonomous.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `dy/dt = f(y)` from `t = 0`, calling `sample(k, y)` when the
/// solution reaches `times[k]`. `times` must be non-decreasing and
/// non-negative. `h_init` is the first trial step.
pub(crate) fn dopri5<F, S>(
    mut rhs: F,
    y: &mut [C64],
    times: &[f64],
    tol: Tolerances,
    h_init: f64,
    mut sample: S,
) -> Result<IntegrationStats>
where
    F: FnMut(&[C64], &mut [C64]),
    S: FnMut(usize, &[C64]) -> Result<()>,
{
    tol.validate()?;
    let n = y.len();
    let [mut k1, mut k2, mut k3, mut k4, mut k5, mut k6, mut k7]: [Vec<C64>; 7] =
        std::array::from_fn(|_| vec![C64::new(0.0, 0.0); n]);
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut y_new = vec![C64::new(0.0, 0.0); n];
    let mut stats = IntegrationStats::default();
    let mut t = 0.0f64;
    let mut h = h_init;
    let mut have_k1 = false;

    for (idx, &target) in times.iter().enumerate() {
        if !(target >= t) {
            return Err(Error::InvalidArgument(format!(
                "sample times must be non-negative and non-decreasing (got {target} after {t})"
            )));
        }
        while t < target {
            if stats.accepted + stats.rejected >= MAX_STEPS {
                return Err(Error::StepLimit(MAX_STEPS));
            }
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if step < 1e-13 * t.abs().max(1.0) && !last {
                return Err(Error::StepUnderflow { t, h: step });
            }
            if !have_k1 {
                rhs(y, &mut k1);
                have_k1 = true;
            }

            for i in 0..n {
                tmp[i] = y[i] + k1[i] * (step * A21);
            }
            rhs(&tmp, &mut k2);
            for i in 0..n {
                tmp[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * step;
            }
            rhs(&tmp, &mut k3);
            for i in 0..n {
                tmp[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * step;
            }
            rhs(&tmp, &mut k4);
            for i in 0..n {
                tmp[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * step;
            }
            rhs(&tmp, &mut k5);
            for i in 0..n {
                tmp[i] = y[i]
                    + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65)
                        * step;
            }
            rhs(&tmp, &mut k6);
            for i in 0..n {
                y_new[i] = y[i]
                    + (k1[i] * B1 + k3[i] * B3 + k4[i] * B4 + k5[i] * B5 + k6[i] * B6) * step;
            }
            rhs(&y_new, &mut k7);

            let mut acc = 0.0;
            for i in 0..n {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6
                    + k7[i] * E7)
                    * step;
                let sc = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
                let r = e.norm() / sc;
                acc += r * r;
            }
            let err = (acc / n as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::NonFiniteState { t });
            }

            if err <= 1.0 {
                stats.accepted += 1;
                t = if last { target } else { t + step };
                y.copy_from_slice(&y_new);
                // First-same-as-last: k7 is f(y_new).
                std::mem::swap(&mut k1, &mut k7);
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                // A step shortened to land on a sample time does not shrink
                // the step carried forward.
                h = if last { h.max(step * factor) } else { step * factor };
            } else {
                stats.rejected += 1;
                h = step * (0.9 * err.powf(-0.2)).max(0.2);
                if h < 1e-13 * t.abs().max(1.0) {
                    return Err(Error::StepUnderflow { t, h });
                }
            }
        }
        if y.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFiniteState { t });
        }
        sample(idx, y)?;
    }
    Ok(stats)
}

/// First trial step: a small fraction of the fastest time scale.
pub(crate) fn initial_step(gen: &GeneratorPair, span: f64) -> f64 {
    let f = gen.max_frequency();
    let h = if f > 0.0 { 0.05 / f } else { span.max(1e-3) };
    h.min(span.max(f64::MIN_POSITIVE))
}

/// Integrates `dg/dt = A(s)·g` from `g(0) = g0` to `t_final`.
///
/// `g0` must be Hermitian with unit trace.
pub fn evolve(
    gen: &GeneratorPair,
    s: f64,
    g0: &GfState,
    t_final: f64,
    tol: Tolerances,
) -> Result<GfState> {
    g0.check_initial(INITIAL_STATE_TOL)?;
    let (g, _) = evolve_flat(gen, s, &g0.to_flat(), t_final, tol)?;
    Ok(GfState::from_flat(&g, g0.time + t_final))
}

/// [`evolve`] on an arbitrary flattened state, without preconditions on it.
pub fn evolve_flat(
    gen: &GeneratorPair,
    s: f64,
    g0: &StateVec,
    t_final: f64,
    tol: Tolerances,
) -> Result<(StateVec, IntegrationStats)> {
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "final time must be finite and non-negative (got {t_final})"
        )));
    }
    if !s.is_finite() {
        return Err(Error::NonFinite { name: "s", value: s });
    }
    let mut y = g0.as_slice().to_vec();
    if t_final == 0.0 {
        return Ok((*g0, IntegrationStats::default()));
    }
    let stats = dopri5(
        |g, out| gen.apply(s, g, out),
        &mut y,
        &[t_final],
        tol,
        initial_step(gen, t_final),
        |_, _| Ok(()),
    )?;
    debug_assert_eq!(y.len(), LEN);
    Ok((StateVec::from_column_slice(&y), stats))
}
