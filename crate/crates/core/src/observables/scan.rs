use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mandel::{mandel_q_for, QValue};
use super::options::NumericOptions;
use super::rate::rate_for_generator;
use crate::engine::{assemble_generators, GfState};
use crate::error::{Error, Result};
use crate::model::{AtomModel, DriveConfig};

/// A scannable model or drive parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanParam {
    DeltaP,
    DeltaC,
    DeltaS,
    OmegaP,
    OmegaC,
    OmegaS,
    Beta,
}

impl ScanParam {
    pub fn name(self) -> &'static str {
        match self {
            ScanParam::DeltaP => "delta_p",
            ScanParam::DeltaC => "delta_c",
            ScanParam::DeltaS => "delta_s",
            ScanParam::OmegaP => "omega_p",
            ScanParam::OmegaC => "omega_c",
            ScanParam::OmegaS => "omega_s",
            ScanParam::Beta => "beta",
        }
    }

    /// CSV column header, carrying the unit.
    pub fn column(self) -> String {
        match self {
            ScanParam::Beta => "beta".to_string(),
            p => format!("{}_MHz", p.name()),
        }
    }

    /// Model and drive with this parameter set to `value`.
    pub fn apply(
        self,
        model: &AtomModel,
        drive: &DriveConfig,
        value: f64,
    ) -> Result<(AtomModel, DriveConfig)> {
        let mut d = *drive;
        let mut m = *model;
        match self {
            ScanParam::DeltaP => d.delta_p = value,
            ScanParam::DeltaC => d.delta_c = value,
            ScanParam::DeltaS => d.delta_s = value,
            ScanParam::OmegaP => d.omega_p = value,
            ScanParam::OmegaC => d.omega_c = value,
            ScanParam::OmegaS => d.omega_s = value,
            ScanParam::Beta => m = model.with_beta(value)?,
        }
        d.validate()?;
        Ok((m, d))
    }
}

impl fmt::Display for ScanParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScanParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let key = key.strip_suffix("_mhz").unwrap_or(&key);
        Ok(match key {
            "delta_p" => ScanParam::DeltaP,
            "delta_c" => ScanParam::DeltaC,
            "delta_s" => ScanParam::DeltaS,
            "omega_p" => ScanParam::OmegaP,
            "omega_c" => ScanParam::OmegaC,
            "omega_s" => ScanParam::OmegaS,
            "beta" => ScanParam::Beta,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown scan parameter `{s}`"
                )))
            }
        })
    }
}

/// A parameter and the grid of values it takes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanAxis {
    pub param: ScanParam,
    pub values: Vec<f64>,
}

impl ScanAxis {
    pub fn new(param: ScanParam, values: Vec<f64>) -> Result<Self> {
        let axis = ScanAxis { param, values };
        axis.validate()?;
        Ok(axis)
    }

    /// `points` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(param: ScanParam, start: f64, stop: f64, points: usize) -> Result<Self> {
        let values = match points {
            0 => Vec::new(),
            1 => vec![start],
            n => (0..n)
                .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
                .collect(),
        };
        ScanAxis::new(param, values)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                name: "scan grid value",
                value: f64::NAN,
            });
        }
        let up = self.values.windows(2).all(|w| w[1] > w[0]);
        let down = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(Error::NonMonotoneGrid);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    /// Emission rate, counts/μs.
    pub rate: f64,
    /// Rate divided by the scan maximum (or the raw rate for an all-dark scan).
    pub intensity: f64,
    pub converged: bool,
    pub dark: bool,
    pub q: QValue,
    pub q_converged: bool,
    /// μs; zero where `Q` was not evaluated.
    pub t_eval: f64,
    /// Set when the point could not be computed at all.
    pub error: Option<String>,
}

impl ScanPoint {
    fn failed(msg: String) -> Self {
        ScanPoint {
            rate: f64::NAN,
            intensity: f64::NAN,
            converged: false,
            dark: false,
            q: QValue::Undefined,
            q_converged: false,
            t_eval: 0.0,
            error: Some(msg),
        }
    }

    /// Converged rate and, when evaluated, converged `Q`.
    pub fn is_clean(&self) -> bool {
        self.error.is_none() && self.converged && self.q_converged
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMeta {
    pub model: AtomModel,
    pub drive: DriveConfig,
    pub options: NumericOptions,
    pub converged_points: usize,
    pub total_points: usize,
    pub max_rate: f64,
}

/// Line shape and `Q` over a 1D grid, or a 2D grid stored row-major with
/// `axis2` as the slow (row) index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub axis1: ScanAxis,
    pub axis2: Option<ScanAxis>,
    pub points: Vec<ScanPoint>,
    /// False when every rate is below the dark threshold; intensities then
    /// hold raw rates.
    pub normalized: bool,
    pub meta: ScanMeta,
}

impl ScanResult {
    pub fn rows(&self) -> usize {
        self.axis2.as_ref().map_or(1, |a| a.len())
    }

    pub fn cols(&self) -> usize {
        self.axis1.len()
    }

    /// Point at `(i1, i2)`; `i2` is ignored for 1D scans.
    pub fn at(&self, i1: usize, i2: usize) -> &ScanPoint {
        &self.points[i2 * self.cols() + i1]
    }

    pub fn row(&self, i2: usize) -> &[ScanPoint] {
        let n = self.cols();
        &self.points[i2 * n..(i2 + 1) * n]
    }

    pub fn intensities(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.intensity).collect()
    }

    pub fn rates(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.rate).collect()
    }

    /// Divides every rate by the largest one. Intensities are always
    /// recomputed from the raw rates, so normalizing twice changes nothing.
    pub fn normalize(&mut self) {
        let max = self
            .points
            .iter()
            .map(|p| p.rate)
            .filter(|r| r.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        self.meta.max_rate = max;
        self.normalized = max >= self.meta.options.dark_threshold;
        for p in &mut self.points {
            p.intensity = if self.normalized { p.rate / max } else { p.rate };
        }
    }

    pub fn all_clean(&self) -> bool {
        self.points.iter().all(ScanPoint::is_clean)
    }
}

fn compute_point(
    model: &AtomModel,
    drive: &DriveConfig,
    opts: &NumericOptions,
) -> Result<ScanPoint> {
    let gen = assemble_generators(model, drive)?;
    let g0 = GfState::ground();
    let rate = rate_for_generator(&gen, model, &g0, opts)?;
    let (q, q_converged, t_eval) = if opts.compute_q {
        let mq = mandel_q_for(&gen, &g0, &rate, opts)?;
        (mq.q, mq.converged, mq.t_eval)
    } else {
        (QValue::Undefined, true, 0.0)
    };
    Ok(ScanPoint {
        rate: rate.rate,
        intensity: rate.rate,
        converged: rate.converged,
        dark: rate.dark,
        q,
        q_converged,
        t_eval,
        error: None,
    })
}

fn run_grid(
    model: &AtomModel,
    template: &DriveConfig,
    axis1: ScanAxis,
    axis2: Option<ScanAxis>,
    opts: &NumericOptions,
) -> Result<ScanResult> {
    opts.validate()?;
    template.validate()?;
    axis1.validate()?;
    if let Some(a) = &axis2 {
        a.validate()?;
    }
    let n1 = axis1.len();
    let n2 = axis2.as_ref().map_or(1, |a| a.len());
    let points: Vec<ScanPoint> = (0..n1 * n2)
        .into_par_iter()
        .map(|k| {
            let (i1, i2) = (k % n1, k / n1);
            let point = || -> Result<ScanPoint> {
                let (mut m, mut d) = axis1.param.apply(model, template, axis1.values[i1])?;
                if let Some(a2) = &axis2 {
                    (m, d) = a2.param.apply(&m, &d, a2.values[i2])?;
                }
                compute_point(&m, &d, opts)
            };
            point().unwrap_or_else(|e| ScanPoint::failed(e.to_string()))
        })
        .collect();
    let converged_points = points.iter().filter(|p| p.converged).count();
    let mut result = ScanResult {
        axis1,
        axis2,
        meta: ScanMeta {
            model: *model,
            drive: *template,
            options: *opts,
            converged_points,
            total_points: points.len(),
            max_rate: f64::NAN,
        },
        points,
        normalized: false,
    };
    result.normalize();
    Ok(result)
}

/// Emission line shape and Mandel `Q` along one axis. Points are computed
/// in parallel; per-point failures are recorded, never fatal.
pub fn line_shape_scan(
    model: &AtomModel,
    drive_template: &DriveConfig,
    axis: ScanAxis,
    opts: &NumericOptions,
) -> Result<ScanResult> {
    run_grid(model, drive_template, axis, None, opts)
}

/// Map over two parameters; `axis1` varies fastest.
pub fn map_2d(
    model: &AtomModel,
    drive_template: &DriveConfig,
    axis1: ScanAxis,
    axis2: ScanAxis,
    opts: &NumericOptions,
) -> Result<ScanResult> {
    run_grid(model, drive_template, axis1, Some(axis2), opts)
}

/// Map in the `Δ_p`–`Δ_c` plane; rows are fixed `Δ_c`.
pub fn detuning_map_2d(
    model: &AtomModel,
    drive_template: &DriveConfig,
    grid_p: Vec<f64>,
    grid_c: Vec<f64>,
    opts: &NumericOptions,
) -> Result<ScanResult> {
    map_2d(
        model,
        drive_template,
        ScanAxis::new(ScanParam::DeltaP, grid_p)?,
        ScanAxis::new(ScanParam::DeltaC, grid_c)?,
        opts,
    )
}
