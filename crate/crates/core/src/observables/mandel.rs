use std::fmt;

use serde::{Deserialize, Serialize};

use super::options::{Method, NumericOptions};
use super::rate::{rate_for_generator, RateEstimate};
use crate::engine::{
    assemble_generators, dopri5, extended_rhs, initial_step, GeneratorPair, GfState,
    MomentBlocks, MomentPropagator,
};
use crate::error::{Error, Result};
use crate::model::{AtomModel, DriveConfig};

/// Counts below which `Q` is not evaluated.
pub const MIN_COUNTS: f64 = 10.0;

/// Mandel `Q`, or the sentinel for points that emit no photons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QValue {
    Defined(f64),
    /// Dark point: `⟨N⁽¹⁾⟩ ≈ 0`, so `Q` has no meaning.
    Undefined,
}

impl QValue {
    pub fn value(self) -> Option<f64> {
        match self {
            QValue::Defined(q) => Some(q),
            QValue::Undefined => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, QValue::Defined(_))
    }
}

impl fmt::Display for QValue {
    /// Undefined values print as `nan`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QValue::Defined(q) => write!(f, "{q:e}"),
            QValue::Undefined => f.write_str("nan"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MandelQ {
    pub q: QValue,
    /// μs; zero when `Q` was not evaluated.
    pub t_eval: f64,
    pub n1: f64,
    pub n2: f64,
    /// `Q` at `1.5·t_eval`.
    pub q_late: Option<f64>,
    /// `|Q(t_eval) − Q(1.5·t_eval)| < q_tol`.
    pub converged: bool,
}

impl MandelQ {
    fn undefined() -> Self {
        MandelQ {
            q: QValue::Undefined,
            t_eval: 0.0,
            n1: 0.0,
            n2: 0.0,
            q_late: None,
            converged: true,
        }
    }
}

/// Mandel `Q = (⟨N⁽²⁾⟩ − ⟨N⁽¹⁾⟩²)/⟨N⁽¹⁾⟩` of photons counted from the ground
/// state up to the evaluation time.
///
/// With `opts.t_eval` unset the evaluation time is the larger of the
/// relaxation time found by the rate iteration and the time needed for
/// `q_target_counts` counts, then stretched by 1.5× steps while `Q` keeps
/// drifting; `t_eval_max` caps it throughout.
pub fn mandel_q(model: &AtomModel, drive: &DriveConfig, opts: &NumericOptions) -> Result<MandelQ> {
    let gen = assemble_generators(model, drive)?;
    let g0 = GfState::ground();
    let rate = rate_for_generator(&gen, model, &g0, opts)?;
    mandel_q_for(&gen, &g0, &rate, opts)
}

pub fn mandel_q_for(
    gen: &GeneratorPair,
    g0: &GfState,
    rate: &RateEstimate,
    opts: &NumericOptions,
) -> Result<MandelQ> {
    opts.validate()?;
    if rate.dark {
        return Ok(MandelQ::undefined());
    }
    let mut t_eval = match opts.t_eval {
        Some(t) => t,
        None => (opts.q_target_counts / rate.rate)
            .max(rate.t_final)
            .min(opts.t_eval_max),
    };
    let (mut early, mut late) = blocks_at(gen, g0, t_eval, opts)?;
    if opts.t_eval.is_none() {
        // The transient lag leaves ⟨N⁽¹⁾⟩ slightly short of rate·T; top up.
        for _ in 0..4 {
            let short = opts.q_target_counts - early.n1().re;
            if short <= 0.0 || t_eval >= opts.t_eval_max {
                break;
            }
            t_eval = (t_eval + 1.01 * short / rate.rate).min(opts.t_eval_max);
            (early, late) = blocks_at(gen, g0, t_eval, opts)?;
        }
    }
    let n1 = early.n1().re;
    if !(n1 > MIN_COUNTS) {
        if opts.t_eval.is_some() {
            return Err(Error::InsufficientCounts { n1, t: t_eval });
        }
        log::debug!("only {n1:.3} counts by the evaluation cap; Q left undefined");
        return Ok(MandelQ::undefined());
    }
    let close = |a: &MomentBlocks, b: &MomentBlocks| match (a.mandel_q(), b.mandel_q()) {
        (Some(x), Some(y)) => (x - y).abs() < opts.q_tol,
        _ => false,
    };
    // In automatic mode a slowly settling Q pushes the evaluation time out
    // by factors of 1.5 until it stabilizes or hits the cap.
    if opts.t_eval.is_none() {
        while !close(&early, &late) && 1.5 * t_eval <= opts.t_eval_max {
            t_eval *= 1.5;
            let next = advance(gen, &late, 0.5 * t_eval, opts)?;
            early = std::mem::replace(&mut late, next);
        }
    }
    let (n1, n2) = (early.n1().re, early.n2().re);
    let q = (n2 - n1 * n1) / n1;
    let q_late = late.mandel_q();
    let converged = close(&early, &late);
    if !q.is_finite() {
        return Err(Error::NonFiniteState { t: t_eval });
    }
    Ok(MandelQ {
        q: QValue::Defined(q),
        t_eval,
        n1,
        n2,
        q_late,
        converged,
    })
}

/// Moment blocks at `t` and `1.5·t`.
fn blocks_at(
    gen: &GeneratorPair,
    g0: &GfState,
    t: f64,
    opts: &NumericOptions,
) -> Result<(MomentBlocks, MomentBlocks)> {
    let start = MomentBlocks::initial(g0);
    match opts.method {
        Method::Exponential => {
            let half = MomentPropagator::new(gen, 0.5 * t)?;
            let early = half.step(&half.step(&start));
            let late = half.step(&early);
            Ok((early, late))
        }
        Method::Adaptive => {
            let early = advance(gen, &start, t, opts)?;
            let late = advance(gen, &early, 0.5 * t, opts)?;
            Ok((early, late))
        }
    }
}

fn advance(
    gen: &GeneratorPair,
    b: &MomentBlocks,
    dt: f64,
    opts: &NumericOptions,
) -> Result<MomentBlocks> {
    match opts.method {
        Method::Exponential => Ok(MomentPropagator::new(gen, dt)?.step(b)),
        Method::Adaptive => {
            let mut y = b.to_vec();
            dopri5(
                |y, out| extended_rhs(gen, y, out),
                &mut y,
                &[dt],
                opts.tol,
                initial_step(gen, dt),
                |_, _| Ok(()),
            )?;
            Ok(MomentBlocks::from_slice(&y))
        }
    }
}
