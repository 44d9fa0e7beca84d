use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown model kind `{0}` (expected `double_lambda` or `n_type`)")]
    UnknownModelKind(String),

    #[error("{name} must be a finite, non-negative rate (got {value})")]
    InvalidRate { name: &'static str, value: f64 },

    #[error("SGC factor beta must lie in [0, 1] (got {0})")]
    BetaOutOfRange(f64),

    #[error("{name} must be finite (got {value})")]
    NonFinite { name: &'static str, value: f64 },

    #[error("{name} must be non-negative (got {value})")]
    Negative { name: &'static str, value: f64 },

    #[error("level index {0} outside 1..=4")]
    InvalidLevel(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("step size underflow at t = {t} us (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("integration exceeded {0} steps")]
    StepLimit(usize),

    #[error("non-finite state detected at t = {t} us")]
    NonFiniteState { t: f64 },

    #[error("steady state is rank deficient beyond dark-state handling")]
    RankDeficient,

    #[error("too few counts for Mandel Q: <N> = {n1:.3e} at T = {t} us (need > 10)")]
    InsufficientCounts { n1: f64, t: f64 },

    #[error("scan grid empty")]
    EmptyGrid,

    #[error("scan grid is not monotone")]
    NonMonotoneGrid,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { name, value })
    }
}

pub(crate) fn rate(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidRate { name, value })
    }
}
