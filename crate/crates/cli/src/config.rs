//! Run configuration files.
//!
//! ```toml
//! [model]
//! kind = "n_type"
//! gamma31 = 1.4375
//! # ...
//!
//! [scan]
//! axis1 = { param = "delta_p_MHz", from = -20.0, to = 20.0, points = 201 }
//!
//! [numeric]
//! t_eval_us = 1000.0
//! ```

use std::path::Path;

use gfcount::{
    build_double_lambda, build_n_type, AtomModel, DecayRates, DoubleLambdaParams, DriveConfig,
    Method, ModelKind, NTypeParams, NumericOptions, ScanAxis, ScanParam, Tolerances,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanBlock>,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default)]
    pub numeric: NumericBlock,
}

/// Physical parameters. Rates, Rabi frequencies and detunings in MHz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub kind: ModelKind,
    pub gamma31: f64,
    pub gamma32: f64,
    pub gamma41: f64,
    pub gamma42: f64,
    pub beta: f64,
    /// Double-Λ only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    pub omega_p: f64,
    pub omega_c: f64,
    /// N-type only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_s: Option<f64>,
    pub delta_p: f64,
    pub delta_c: f64,
    /// N-type only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    pub axis1: AxisSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis2: Option<AxisSpec>,
}

/// Either `from`/`to`/`points` or an explicit `values` list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    /// Parameter with its unit, e.g. `delta_p_MHz` or `beta`.
    pub param: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    /// File stem of the outputs; defaults to the config file stem.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basename: Option<String>,
    /// Also write a whitespace-separated intensity matrix for 2D scans.
    pub matrix: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericBlock {
    pub rtol: f64,
    pub atol: f64,
    pub method: Method,
    pub rate_tol: f64,
    pub window_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max_us: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_eval_us: Option<f64>,
    pub t_eval_max_us: f64,
    pub q_target_counts: f64,
    pub q_tol: f64,
    pub dark_threshold: f64,
    pub compute_q: bool,
    pub n_max: usize,
}

impl Default for NumericBlock {
    fn default() -> Self {
        let o = NumericOptions::default();
        NumericBlock {
            rtol: o.tol.rtol,
            atol: o.tol.atol,
            method: o.method,
            rate_tol: o.rate_tol,
            window_samples: o.window_samples,
            t_max_us: o.t_max,
            t_eval_us: o.t_eval,
            t_eval_max_us: o.t_eval_max,
            q_target_counts: o.q_target_counts,
            q_tol: o.q_tol,
            dark_threshold: o.dark_threshold,
            compute_q: o.compute_q,
            n_max: 200,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse(inner) => CliError::ParseFile {
                path: path.to_path_buf(),
                source: inner,
            },
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks everything that can be checked without running anything.
    pub fn validate(&self) -> Result<()> {
        self.model.build()?;
        self.numeric.options()?;
        if let Some(scan) = &self.scan {
            scan.axis1.axis("scan.axis1")?;
            if let Some(a2) = &scan.axis2 {
                a2.axis("scan.axis2")?;
            }
        }
        Ok(())
    }

    pub fn basename(&self, config_path: &Path) -> String {
        self.output.basename.clone().unwrap_or_else(|| {
            config_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "run".into())
        })
    }
}

impl ModelBlock {
    pub fn build(&self) -> Result<(AtomModel, DriveConfig)> {
        let rates = DecayRates {
            gamma31: self.gamma31,
            gamma32: self.gamma32,
            gamma41: self.gamma41,
            gamma42: self.gamma42,
        };
        let built = match self.kind {
            ModelKind::DoubleLambda => {
                for (name, v) in [("omega_s", self.omega_s), ("delta_s", self.delta_s)] {
                    if v.is_some() {
                        return Err(CliError::field(
                            format!("model.{name}"),
                            "not a parameter of the double_lambda model",
                        ));
                    }
                }
                let omega = self
                    .omega
                    .ok_or_else(|| CliError::field("model.omega", "required for double_lambda"))?;
                build_double_lambda(&DoubleLambdaParams {
                    rates,
                    beta: self.beta,
                    omega,
                    omega_p: self.omega_p,
                    omega_c: self.omega_c,
                    delta_p: self.delta_p,
                    delta_c: self.delta_c,
                })
            }
            ModelKind::NType => {
                if self.omega.is_some() {
                    return Err(CliError::field("model.omega", "not a parameter of the n_type model"));
                }
                build_n_type(&NTypeParams {
                    rates,
                    beta: self.beta,
                    omega_p: self.omega_p,
                    omega_c: self.omega_c,
                    omega_s: self.omega_s.unwrap_or(0.0),
                    delta_p: self.delta_p,
                    delta_c: self.delta_c,
                    delta_s: self.delta_s.unwrap_or(0.0),
                })
            }
        };
        built.map_err(|e| CliError::field("model", e.to_string()))
    }
}

impl AxisSpec {
    pub fn param(&self, field: &str) -> Result<ScanParam> {
        self.param
            .parse()
            .map_err(|e: gfcount::Error| CliError::field(format!("{field}.param"), e.to_string()))
    }

    pub fn axis(&self, field: &str) -> Result<ScanAxis> {
        let param = self.param(field)?;
        let axis = match (&self.values, self.from, self.to, self.points) {
            (Some(values), None, None, None) => ScanAxis::new(param, values.clone()),
            (None, Some(from), Some(to), Some(points)) => {
                if points == 1 {
                    return Err(CliError::field(format!("{field}.points"), "need at least 2 points"));
                }
                if points >= 2 && !(to > from) {
                    return Err(CliError::field(field, "range must be increasing (from < to)"));
                }
                ScanAxis::linspace(param, from, to, points)
            }
            _ => {
                return Err(CliError::field(
                    field,
                    "give either `values` or all of `from`, `to`, `points`",
                ))
            }
        };
        axis.map_err(|e| CliError::field(field, e.to_string()))
    }
}

impl NumericBlock {
    pub fn options(&self) -> Result<NumericOptions> {
        let opts = NumericOptions {
            tol: Tolerances { rtol: self.rtol, atol: self.atol },
            method: self.method,
            rate_tol: self.rate_tol,
            window_samples: self.window_samples,
            t_max: self.t_max_us,
            t_eval: self.t_eval_us,
            t_eval_max: self.t_eval_max_us,
            q_target_counts: self.q_target_counts,
            q_tol: self.q_tol,
            dark_threshold: self.dark_threshold,
            compute_q: self.compute_q,
        };
        opts.validate().map_err(|e| CliError::field("numeric", e.to_string()))?;
        Ok(opts)
    }
}
