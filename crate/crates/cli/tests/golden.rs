//! Reruns the shipped figure configs against the committed reference CSVs.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use gfcount_cli::config::AxisSpec;
use gfcount_cli::{Command, Run, RunConfig};

const NORM_TOL: f64 = 1e-6;
const Q_TOL: f64 = 1e-4;
/// Larger grids are checked on every `STRIDE`-th value of each axis.
const FULL_RERUN_POINTS: usize = 5000;
const STRIDE: usize = 10;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

type Table = Vec<HashMap<String, String>>;

fn read(path: &Path) -> Table {
    let mut r = csv::Reader::from_path(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    r.records()
        .map(|rec| header.iter().cloned().zip(rec.unwrap().iter().map(String::from)).collect())
        .collect()
}

fn f(row: &HashMap<String, String>, col: &str) -> f64 {
    row[col].parse().unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a.is_nan() && b.is_nan()) || (a - b).abs() <= tol
}

fn axis_values(spec: &AxisSpec) -> Vec<f64> {
    spec.axis("axis").unwrap().values
}

fn strided(spec: &AxisSpec) -> AxisSpec {
    let v = axis_values(spec);
    AxisSpec {
        param: spec.param.clone(),
        from: None,
        to: None,
        points: None,
        values: Some(v.into_iter().step_by(STRIDE).collect()),
    }
}

fn key(row: &HashMap<String, String>, cols: &[String]) -> Vec<u64> {
    cols.iter().map(|c| f(row, c).to_bits()).collect()
}

fn check(name: &str) {
    let cfg_path = configs_dir().join(format!("{name}.toml"));
    let golden = read(&configs_dir().join("golden").join(format!("{name}.csv")));
    let mut cfg = RunConfig::load(&cfg_path).unwrap();
    let scan = cfg.scan.clone().unwrap();
    let cmd = if scan.axis2.is_some() { Command::Map2d } else { Command::Spectrum };
    let total = axis_values(&scan.axis1).len() * scan.axis2.as_ref().map_or(1, |a| axis_values(a).len());
    let full = total <= FULL_RERUN_POINTS;
    if !full {
        let s = cfg.scan.as_mut().unwrap();
        s.axis1 = strided(&s.axis1);
        s.axis2 = s.axis2.as_ref().map(strided);
    }
    cfg.output.matrix = false;
    let dir = tempfile::tempdir().unwrap();
    let run = Run { config: &cfg, out_dir: dir.path(), basename: name.into() };
    run.execute(cmd).unwrap();
    let fresh = read(&dir.path().join(format!("{name}.csv")));

    let mut coords = vec![scan.axis1.param(name).unwrap().column()];
    if let Some(a2) = &scan.axis2 {
        coords.push(a2.param(name).unwrap().column());
    }
    let by_key: HashMap<Vec<u64>, &HashMap<String, String>> =
        golden.iter().map(|r| (key(r, &coords), r)).collect();
    let max_raw = golden.iter().map(|r| f(r, "intensity_raw")).filter(|v| v.is_finite()).fold(0.0, f64::max);
    assert_eq!(fresh.len(), if full { golden.len() } else { fresh.len() });
    let mut worst = (0.0f64, 0.0f64);
    for row in &fresh {
        let g = by_key.get(&key(row, &coords)).unwrap_or_else(|| panic!("{name}: grid point missing from golden file"));
        // Subsampled grids are normalized differently; compare against the
        // golden maximum instead.
        let (a, b) = if full {
            (f(row, "intensity_norm"), f(g, "intensity_norm"))
        } else {
            (f(row, "intensity_raw") / max_raw, f(g, "intensity_raw") / max_raw)
        };
        assert!(close(a, b, NORM_TOL), "{name}: intensity {a} vs golden {b} at {:?}", key(row, &coords));
        let (qa, qb) = (f(row, "q"), f(g, "q"));
        assert!(close(qa, qb, Q_TOL), "{name}: q {qa} vs golden {qb}");
        assert_eq!(row["converged"], g["converged"], "{name}");
        assert_eq!(row["dark_flag"], g["dark_flag"], "{name}");
        if a.is_finite() {
            worst.0 = worst.0.max((a - b).abs());
        }
        if qa.is_finite() {
            worst.1 = worst.1.max((qa - qb).abs());
        }
    }
    println!("{name}: {} points, max |d intensity| {:.1e}, max |d q| {:.1e}", fresh.len(), worst.0, worst.1);
}

macro_rules! golden {
    ($($name:ident),* $(,)?) => {$(
        #[test]
        fn $name() {
            check(stringify!($name));
        }
    )*};
}

golden!(
    fig2a, fig2c, fig3a, fig3a_dashdot, fig3c, fig3c_dashdot, fig3d_green, fig4a, fig4c, fig5a,
    fig5a_betas, fig5c, fig5c_betas, fig5d,
);

/// Every shipped config has a golden file and vice versa.
#[test]
fn golden_set_is_complete() {
    let stems = |dir: PathBuf, ext: &str| {
        let mut v: Vec<String> = std::fs::read_dir(dir)
            .unwrap()
            .filter_map(|e| {
                let p = e.unwrap().path();
                (p.extension()? == ext).then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
            })
            .collect();
        v.sort();
        v
    };
    assert_eq!(stems(configs_dir(), "toml"), stems(configs_dir().join("golden"), "csv"));
}
