//! Emission rate, Mandel `Q` and parameter scans.

mod mandel;
mod options;
pub mod peaks;
mod rate;
mod scan;

pub use mandel::{mandel_q, mandel_q_for, MandelQ, QValue, MIN_COUNTS};
pub use options::{Method, NumericOptions};
pub use rate::{steady_emission_rate, RateEstimate};
pub use scan::{
    detuning_map_2d, line_shape_scan, map_2d, ScanAxis, ScanMeta, ScanParam, ScanPoint,
    ScanResult,
};
