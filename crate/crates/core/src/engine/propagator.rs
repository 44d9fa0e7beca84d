use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::generator::{GeneratorPair, Mat16};
use super::moments::MomentBlocks;
use super::state::LEN;
use crate::error::{Error, Result};

/// Exact propagator of the moment blocks over a fixed time step.
///
/// The extended generator is block lower triangular,
/// `M = [[A, 0, 0], [A₁, A, 0], [0, 2A₁, A]]`, so `exp(M·dt)` has the form
/// `[[E, 0, 0], [F, E, 0], [H, 2F, E]]` and only `E`, `F`, `H` are kept.
#[derive(Debug, Clone)]
pub struct MomentPropagator {
    dt: f64,
    e: Mat16,
    f: Mat16,
    h: Mat16,
}

impl MomentPropagator {
    pub fn new(gen: &GeneratorPair, dt: f64) -> Result<Self> {
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "propagator step must be finite and non-negative (got {dt})"
            )));
        }
        let a = gen.total(1.0);
        let a1 = gen.a1();
        let n = 3 * LEN;
        let mut m = DMatrix::<C64>::zeros(n, n);
        let scale = C64::new(dt, 0.0);
        for r in 0..LEN {
            for c in 0..LEN {
                let av = a[(r, c)] * scale;
                let bv = a1[(r, c)] * scale;
                m[(r, c)] = av;
                m[(LEN + r, LEN + c)] = av;
                m[(2 * LEN + r, 2 * LEN + c)] = av;
                m[(LEN + r, c)] = bv;
                m[(2 * LEN + r, LEN + c)] = bv * 2.0;
            }
        }
        let x = m.exp();
        let block = |br: usize, bc: usize| Mat16::from_fn(|r, c| x[(br * LEN + r, bc * LEN + c)]);
        let prop = MomentPropagator {
            dt,
            e: block(0, 0),
            f: block(1, 0),
            h: block(2, 0),
        };
        if prop.e.iter().chain(prop.f.iter()).chain(prop.h.iter()).any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFiniteState { t: dt });
        }
        Ok(prop)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `b` by one step.
    pub fn step(&self, b: &MomentBlocks) -> MomentBlocks {
        MomentBlocks {
            g: self.e * b.g,
            g1: self.f * b.g + self.e * b.g1,
            g2: self.h * b.g + self.f * b.g1 * C64::new(2.0, 0.0) + self.e * b.g2,
        }
    }

    /// Advances only the `g`, `g1` blocks; `g2` is left untouched.
    pub fn step_first_order(&self, b: &mut MomentBlocks) {
        let g = self.e * b.g;
        b.g1 = self.f * b.g + self.e * b.g1;
        b.g = g;
    }
}
