use serde::{Deserialize, Serialize};

use crate::engine::Tolerances;
use crate::error::{Error, Result};
use crate::model::AtomModel;

/// How moment blocks are advanced in time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Exact block propagator `exp(M·dt)` reused across steps.
    #[default]
    Exponential,
    /// Adaptive Dormand–Prince integration.
    Adaptive,
}

/// Numerical settings shared by all observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericOptions {
    pub tol: Tolerances,
    pub method: Method,
    /// Relative change of the windowed slope accepted as converged.
    pub rate_tol: f64,
    /// Samples per slope window.
    pub window_samples: usize,
    /// Give-up time for the slope iteration, μs. Defaults to `2000/Γ₃`.
    pub t_max: Option<f64>,
    /// Fixed Mandel-Q evaluation time, μs. When absent it is chosen so that
    /// `⟨N⁽¹⁾⟩` reaches `q_target_counts`.
    pub t_eval: Option<f64>,
    /// Upper bound on the automatically chosen evaluation time, μs.
    pub t_eval_max: f64,
    pub q_target_counts: f64,
    /// Absolute tolerance on `Q(T) − Q(1.5·T)`.
    pub q_tol: f64,
    /// Emission rates below this (counts/μs) mark a dark point.
    pub dark_threshold: f64,
    pub compute_q: bool,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions {
            tol: Tolerances::default(),
            method: Method::Exponential,
            rate_tol: 1e-5,
            window_samples: 64,
            t_max: None,
            t_eval: None,
            t_eval_max: 1e6,
            q_target_counts: 50.0,
            q_tol: 1e-2,
            dark_threshold: 1e-6,
            compute_q: true,
        }
    }
}

impl NumericOptions {
    pub fn validate(&self) -> Result<()> {
        self.tol.validate()?;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be positive (got {v})")))
            }
        };
        positive("rate_tol", self.rate_tol)?;
        positive("t_eval_max", self.t_eval_max)?;
        positive("q_target_counts", self.q_target_counts)?;
        positive("q_tol", self.q_tol)?;
        positive("dark_threshold", self.dark_threshold)?;
        if let Some(t) = self.t_max {
            positive("t_max", t)?;
        }
        if let Some(t) = self.t_eval {
            positive("t_eval", t)?;
        }
        if self.window_samples < 2 {
            return Err(Error::InvalidArgument("window_samples must be at least 2".into()));
        }
        Ok(())
    }

    /// Relaxation rate setting the slope window (`20/Γ`) and the give-up
    /// time (`2000/Γ`): `Γ₃`, falling back to `Γ₄` or 1 μs⁻¹.
    pub(crate) fn relaxation_rate(model: &AtomModel) -> f64 {
        [model.big_gamma3(), model.big_gamma4()]
            .into_iter()
            .find(|&g| g > 0.0)
            .unwrap_or(1.0)
    }

    pub(crate) fn window_length(model: &AtomModel) -> f64 {
        20.0 / Self::relaxation_rate(model)
    }

    pub(crate) fn t_max_for(&self, model: &AtomModel) -> f64 {
        self.t_max
            .unwrap_or(2000.0 / Self::relaxation_rate(model))
    }
}
