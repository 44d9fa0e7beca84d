//! CSV tables and `.meta` sidecars.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use gfcount::{AtomModel, DriveConfig, NumericOptions, QValue, ScanResult};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write { path: path.to_path_buf(), source }
}

/// Shortest round-trip representation; `nan` for missing values.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:e}")
    }
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn q_cell(q: QValue) -> String {
    q.value().map_or_else(|| "nan".into(), num)
}

pub fn write_rows(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| write_err(path)(e.into()))?;
    w.write_record(header).map_err(|e| write_err(path)(e.into()))?;
    for row in rows {
        w.write_record(&row).map_err(|e| write_err(path)(e.into()))?;
    }
    w.flush().map_err(write_err(path))
}

const POINT_COLUMNS: [&str; 5] = ["intensity_raw", "intensity_norm", "q", "converged", "dark_flag"];

/// One row per grid point; `axis2` is the outer loop.
pub fn write_scan(path: &Path, scan: &ScanResult) -> Result<()> {
    let mut header = vec![scan.axis1.param.column()];
    if let Some(a2) = &scan.axis2 {
        header.push(a2.param.column());
    }
    header.extend(POINT_COLUMNS.iter().map(|s| s.to_string()));
    let rows = (0..scan.rows()).flat_map(|i2| {
        (0..scan.cols()).map(move |i1| {
            let p = scan.at(i1, i2);
            let mut row = vec![num(scan.axis1.values[i1])];
            if let Some(a2) = &scan.axis2 {
                row.push(num(a2.values[i2]));
            }
            row.extend([
                num(p.rate),
                num(p.intensity),
                q_cell(p.q),
                flag(p.is_clean()).into(),
                flag(p.dark).into(),
            ]);
            row
        })
    });
    write_rows(path, &header, rows)
}

/// Normalized intensity as a text matrix: one line per `axis2` value.
pub fn write_matrix(path: &Path, scan: &ScanResult) -> Result<()> {
    let file = File::create(path).map_err(write_err(path))?;
    let mut w = BufWriter::new(file);
    let a2 = scan.axis2.as_ref().map_or("-".to_string(), |a| a.param.column());
    let mut body = || -> std::io::Result<()> {
        writeln!(w, "# intensity_norm; rows: {a2}, columns: {}", scan.axis1.param.column())?;
        for i2 in 0..scan.rows() {
            let line: Vec<String> = (0..scan.cols()).map(|i1| num(scan.at(i1, i2).intensity)).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        w.flush()
    };
    body().map_err(write_err(path))
}

#[derive(Debug, Default, Serialize)]
pub struct RunStats {
    pub total_points: usize,
    pub clean_points: usize,
    pub rate_not_converged: usize,
    pub q_not_converged: usize,
    pub failed_points: usize,
    pub dark_points: usize,
    pub max_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_eval_min_us: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_eval_max_us: Option<f64>,
    pub wall_seconds: f64,
    pub threads: usize,
}

impl RunStats {
    pub fn from_scan(scan: &ScanResult) -> Self {
        let pts = &scan.points;
        let t: Vec<f64> = pts.iter().map(|p| p.t_eval).filter(|&t| t > 0.0).collect();
        RunStats {
            total_points: pts.len(),
            clean_points: pts.iter().filter(|p| p.is_clean()).count(),
            rate_not_converged: pts.iter().filter(|p| p.error.is_none() && !p.converged).count(),
            q_not_converged: pts.iter().filter(|p| p.error.is_none() && !p.q_converged).count(),
            failed_points: pts.iter().filter(|p| p.error.is_some()).count(),
            dark_points: pts.iter().filter(|p| p.dark).count(),
            max_rate: scan.meta.max_rate,
            t_eval_min_us: t.iter().copied().reduce(f64::min),
            t_eval_max_us: t.iter().copied().reduce(f64::max),
            wall_seconds: 0.0,
            threads: rayon::current_num_threads(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Resolved {
    pub model: AtomModel,
    pub drive: DriveConfig,
    pub options: NumericOptions,
}

#[derive(Debug, Serialize)]
pub struct Meta<'a> {
    pub tool: String,
    pub command: &'a str,
    pub outputs: Vec<String>,
    pub config: &'a RunConfig,
    pub resolved: Resolved,
    pub stats: RunStats,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

pub fn write_meta(path: &Path, meta: &Meta<'_>) -> Result<()> {
    let text = toml::to_string(meta).map_err(|e| CliError::Write {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    })?;
    std::fs::write(path, text).map_err(write_err(path))
}

pub fn file_names(paths: &[PathBuf]) -> Vec<String> {
    paths
        .iter()
        .map(|p| p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default())
        .collect()
}
