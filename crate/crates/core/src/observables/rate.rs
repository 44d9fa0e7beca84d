use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::options::{Method, NumericOptions};
use crate::engine::{
    assemble_generators, dopri5, initial_step, GeneratorPair, GfState, MomentBlocks,
    MomentPropagator, LEN,
};
use crate::error::{Error, Result};
use crate::model::{AtomModel, DriveConfig};

/// Long-time photon emission rate `d⟨N⁽¹⁾⟩/dt` (counts/μs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub rate: f64,
    /// Successive window slopes agreed to `rate_tol`.
    pub converged: bool,
    /// Time at which the iteration stopped, μs.
    pub t_final: f64,
    pub windows: usize,
    /// `rate` is below the dark threshold.
    pub dark: bool,
}

/// Advances `(g, g1)` over a fixed interval.
pub(crate) enum FirstOrderStepper<'a> {
    Exponential(MomentPropagator),
    Adaptive {
        gen: &'a GeneratorPair,
        opts: NumericOptions,
        dt: f64,
        buf: Vec<C64>,
    },
}

impl<'a> FirstOrderStepper<'a> {
    pub(crate) fn new(gen: &'a GeneratorPair, dt: f64, opts: &NumericOptions) -> Result<Self> {
        Ok(match opts.method {
            Method::Exponential => FirstOrderStepper::Exponential(MomentPropagator::new(gen, dt)?),
            Method::Adaptive => FirstOrderStepper::Adaptive {
                gen,
                opts: *opts,
                dt,
                buf: vec![C64::new(0.0, 0.0); 2 * LEN],
            },
        })
    }

    pub(crate) fn advance(&mut self, b: &mut MomentBlocks) -> Result<()> {
        match self {
            FirstOrderStepper::Exponential(p) => {
                p.step_first_order(b);
                if b.g1.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                    return Err(Error::NonFiniteState { t: f64::NAN });
                }
                Ok(())
            }
            FirstOrderStepper::Adaptive { gen, opts, dt, buf } => {
                buf[..LEN].copy_from_slice(b.g.as_slice());
                buf[LEN..].copy_from_slice(b.g1.as_slice());
                let gen: &GeneratorPair = gen;
                dopri5(
                    |y, out| {
                        let (g, g1) = y.split_at(LEN);
                        let (o, o1) = out.split_at_mut(LEN);
                        gen.apply(1.0, g, o);
                        gen.apply(1.0, g1, o1);
                        gen.add_a1(1.0, g, o1);
                    },
                    buf,
                    &[*dt],
                    opts.tol,
                    initial_step(gen, *dt),
                    |_, _| Ok(()),
                )?;
                b.g.copy_from_slice(&buf[..LEN]);
                b.g1.copy_from_slice(&buf[LEN..]);
                Ok(())
            }
        }
    }
}

/// Least-squares slope of `y` against `x`.
pub(crate) fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

/// Emission rate from the windowed slope of `⟨N⁽¹⁾⟩(t)`.
///
/// `⟨N⁽¹⁾⟩` is propagated from the ground state over consecutive windows of
/// length `20/Γ₃`; the least-squares slope of each window is compared with
/// the previous one until they agree to `rate_tol` (relative), or `t_max`
/// is reached, in which case the last slope is returned unconverged.
pub fn steady_emission_rate(
    model: &AtomModel,
    drive: &DriveConfig,
    opts: &NumericOptions,
) -> Result<RateEstimate> {
    let gen = assemble_generators(model, drive)?;
    rate_for_generator(&gen, model, &GfState::ground(), opts)
}

pub(crate) fn rate_for_generator(
    gen: &GeneratorPair,
    model: &AtomModel,
    g0: &GfState,
    opts: &NumericOptions,
) -> Result<RateEstimate> {
    opts.validate()?;
    let window = NumericOptions::window_length(model);
    let t_max = opts.t_max_for(model);
    let m = opts.window_samples;
    let dt = window / m as f64;
    let mut stepper = FirstOrderStepper::new(gen, dt, opts)?;
    let mut blocks = MomentBlocks::initial(g0);
    let mut ts = vec![0.0; m + 1];
    let mut ns = vec![0.0; m + 1];
    let mut start = 0.0;
    let mut prev: Option<f64> = None;
    let mut windows = 0;
    let mut slope;
    let mut converged = false;
    loop {
        ts[0] = start;
        ns[0] = blocks.n1().re;
        for k in 1..=m {
            stepper.advance(&mut blocks)?;
            ts[k] = start + k as f64 * dt;
            ns[k] = blocks.n1().re;
        }
        start += window;
        windows += 1;
        slope = ls_slope(&ts, &ns);
        if !slope.is_finite() {
            return Err(Error::NonFiniteState { t: start });
        }
        if let Some(p) = prev {
            let scale = slope.abs() + opts.dark_threshold;
            if (slope - p).abs() <= opts.rate_tol * scale {
                converged = true;
                break;
            }
        }
        prev = Some(slope);
        if start >= t_max {
            break;
        }
    }
    if !converged {
        log::debug!("emission rate not converged by t = {start} us (last slope {slope:e})");
    }
    Ok(RateEstimate {
        rate: slope,
        converged,
        t_final: start,
        windows,
        dark: slope < opts.dark_threshold,
    })
}
