use std::path::{Path, PathBuf};
use std::time::Instant;

use gfcount::engine::{evolve_flat, DEFICIT_WARN};
use gfcount::oracle::DEFICIT_SKIP;
use gfcount::{
    assemble_generators, evolve_factorial_moments, evolve_pn, finite_difference_moments,
    hierarchy_consistency, line_shape_scan, map_2d, null_space_steady_state,
    steady_emission_rate, GfState, ScanResult, C64,
};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{self, num, Meta, Resolved, RunStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Spectrum,
    Map2d,
    Pn,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Map2d => "map2d",
            Command::Pn => "pn",
            Command::Validate => "validate",
        }
    }
}

/// Files written and numerical-quality warnings raised by a run.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.warnings.is_empty() {
            0
        } else {
            2
        }
    }
}

pub struct Run<'a> {
    pub config: &'a RunConfig,
    pub out_dir: &'a Path,
    pub basename: String,
}

impl Run<'_> {
    fn path(&self, suffix: &str) -> PathBuf {
        self.out_dir.join(format!("{}{suffix}", self.basename))
    }

    pub fn execute(&self, cmd: Command) -> Result<Outcome> {
        self.config.validate()?;
        std::fs::create_dir_all(self.out_dir).map_err(|source| CliError::Write {
            path: self.out_dir.to_path_buf(),
            source,
        })?;
        let t0 = Instant::now();
        let (mut outcome, mut stats) = match cmd {
            Command::Spectrum => self.scan(false)?,
            Command::Map2d => self.scan(true)?,
            Command::Pn => self.pn()?,
            Command::Validate => self.validate()?,
        };
        stats.wall_seconds = t0.elapsed().as_secs_f64();
        let (model, drive) = self.config.model.build()?;
        let meta_path = self.path(".meta");
        let meta = Meta {
            tool: concat!("gfcount ", env!("CARGO_PKG_VERSION")).into(),
            command: cmd.name(),
            outputs: output::file_names(&outcome.files),
            config: self.config,
            resolved: Resolved { model, drive, options: self.config.numeric.options()? },
            stats,
            warnings: outcome.warnings.clone(),
        };
        output::write_meta(&meta_path, &meta)?;
        outcome.files.push(meta_path);
        Ok(outcome)
    }

    fn scan(&self, two_d: bool) -> Result<(Outcome, RunStats)> {
        let (model, drive) = self.config.model.build()?;
        let opts = self.config.numeric.options()?;
        let scan_block = self
            .config
            .scan
            .as_ref()
            .ok_or_else(|| CliError::field("scan", "missing [scan] block"))?;
        let axis1 = scan_block.axis1.axis("scan.axis1")?;
        let result: ScanResult = match (two_d, &scan_block.axis2) {
            (false, None) => line_shape_scan(&model, &drive, axis1, &opts)?,
            (true, Some(a2)) => map_2d(&model, &drive, axis1, a2.axis("scan.axis2")?, &opts)?,
            (false, Some(_)) => {
                return Err(CliError::field("scan.axis2", "spectrum takes a single axis; use map2d"))
            }
            (true, None) => return Err(CliError::field("scan.axis2", "map2d needs a second axis")),
        };
        let csv = self.path(".csv");
        output::write_scan(&csv, &result)?;
        let mut outcome = Outcome { files: vec![csv], warnings: Vec::new() };
        if two_d && self.config.output.matrix {
            let m = self.path(".matrix.txt");
            output::write_matrix(&m, &result)?;
            outcome.files.push(m);
        }
        let stats = RunStats::from_scan(&result);
        let unclean = stats.total_points - stats.clean_points;
        if unclean > 0 {
            outcome.warnings.push(format!(
                "{unclean} of {} points not converged ({} rate, {} Q, {} failed)",
                stats.total_points, stats.rate_not_converged, stats.q_not_converged, stats.failed_points
            ));
        }
        if !result.normalized {
            outcome.warnings.push("every point is dark; intensities left unnormalized".into());
        }
        Ok((outcome, stats))
    }

    fn pn(&self) -> Result<(Outcome, RunStats)> {
        let (model, drive) = self.config.model.build()?;
        let num_block = &self.config.numeric;
        let t = num_block
            .t_eval_us
            .ok_or_else(|| CliError::field("numeric.t_eval_us", "required by pn"))?;
        let tol = num_block.options()?.tol;
        let gen = assemble_generators(&model, &drive)?;
        let g0 = GfState::ground();
        let h = evolve_pn(&gen, &g0, t, num_block.n_max, tol)?;
        let blocks = evolve_factorial_moments(&gen, &g0, &[t], tol)?;
        let (n1, n2) = (blocks.n1[0], blocks.n2[0]);
        let q = if n1 > 0.0 { (n2 - n1 * n1) / n1 } else { f64::NAN };

        let last = h.probabilities.iter().rposition(|&p| p != 0.0).unwrap_or(0);
        let mut rows: Vec<Vec<String>> = h.probabilities[..=last]
            .iter()
            .enumerate()
            .map(|(n, &p)| vec![n.to_string(), num(p)])
            .collect();
        for (k, v) in [("N1", n1), ("N2", n2), ("Q", q), ("deficit", h.deficit)] {
            rows.push(vec![k.into(), num(v)]);
        }
        let csv = self.path(".csv");
        output::write_rows(&csv, &["n".into(), "p_n".into()], rows)?;

        let mut outcome = Outcome { files: vec![csv], warnings: Vec::new() };
        if h.deficit_exceeds(DEFICIT_WARN) {
            outcome.warnings.push(format!(
                "truncation deficit {:.3e} exceeds {DEFICIT_WARN:e}; raise numeric.n_max",
                h.deficit
            ));
        } else {
            let (m1, _) = h.factorial_moments();
            let allowance = 1e-6 * n1.max(1.0) + (h.probabilities.len() as f64) * h.deficit.abs();
            if (m1 - n1).abs() > allowance {
                outcome
                    .warnings
                    .push(format!("sum n P_n = {m1:e} disagrees with <N> = {n1:e}"));
            }
        }
        let stats = RunStats {
            total_points: 1,
            clean_points: usize::from(outcome.warnings.is_empty()),
            max_rate: f64::NAN,
            t_eval_min_us: Some(t),
            t_eval_max_us: Some(t),
            threads: rayon::current_num_threads(),
            ..Default::default()
        };
        Ok((outcome, stats))
    }

    fn validate(&self) -> Result<(Outcome, RunStats)> {
        let (model, drive) = self.config.model.build()?;
        let opts = self.config.numeric.options()?;
        let gen = assemble_generators(&model, &drive)?;
        let g0 = GfState::ground();
        let mut checks = Vec::new();

        let g31 = model.rates().gamma31;
        let t_end = if g31 > 0.0 { 100.0 / g31 } else { 100.0 };
        let (mut tr_err, mut herm) = (0.0f64, 0.0f64);
        let mut y = g0.to_flat();
        for _ in 0..10 {
            y = evolve_flat(&gen, 1.0, &y, t_end / 10.0, opts.tol)?.0;
            let g = GfState::from_flat(&y, 0.0);
            tr_err = tr_err.max((g.trace() - C64::new(1.0, 0.0)).norm());
            herm = herm.max(g.hermiticity_defect());
        }
        checks.push(Check::below("trace |tr G - 1|", tr_err, 1e-8));
        checks.push(Check::below("hermiticity defect", herm, 1e-8));

        // Long horizons amplify roundoff in the stencils for fast systems.
        let t = opts.t_eval.unwrap_or((1e4 / gen.max_frequency().max(1.0)).min(50.0));
        let blocks = evolve_factorial_moments(&gen, &g0, &[t], opts.tol)?;
        let (n1, n2) = (blocks.n1[0], blocks.n2[0]);
        let (f1, _) = finite_difference_moments(&gen, &g0, t, 1e-4)?;
        let (_, f2) = finite_difference_moments(&gen, &g0, t, 1e-3)?;
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-6);
        checks.push(Check::below("stencil <N(1)>", rel(f1, n1), 1e-4));
        checks.push(Check::below("stencil <N(2)>", rel(f2, n2), 1e-4));

        let n_max = self.config.numeric.n_max;
        let rep = hierarchy_consistency(&gen, &g0, t, n_max)?;
        let mut c = Check::below("P_n hierarchy", rep.max_state_error, gfcount::oracle::STATE_TOL);
        c.pass = rep.passed();
        if rep.skipped {
            c.note = format!("deficit {:.1e} >= {DEFICIT_SKIP:e}; raise numeric.n_max", rep.deficit);
        }
        checks.push(c);

        let ss = null_space_steady_state(&gen)?;
        let alg = ss.emission_rate(&gen);
        let slope = steady_emission_rate(&model, &drive, &opts)?;
        let mut c = Check::below(
            "slope vs algebraic rate",
            (slope.rate - alg).abs() / alg.abs().max(opts.dark_threshold),
            1e-4,
        );
        if !slope.converged {
            c.pass = false;
            c.note = "slope did not converge".into();
        }
        checks.push(c);
        let min_pop = ss.populations().iter().copied().fold(f64::INFINITY, f64::min);
        checks.push(Check::below("steady trace error", ss.trace_error, 1e-10));
        checks.push(Check::below("steady hermiticity", ss.hermiticity_defect(), 1e-10));
        checks.push(Check::below("steady negative population", (-min_pop).max(0.0), 1e-10));

        let table = render(&checks);
        print!("{table}");
        let report = self.path(".validate.txt");
        std::fs::write(&report, &table).map_err(|source| CliError::Write { path: report.clone(), source })?;
        let failed: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.name.to_string()).collect();
        let mut outcome = Outcome { files: vec![report], warnings: Vec::new() };
        if !failed.is_empty() {
            outcome.warnings.push(format!("failed checks: {}", failed.join(", ")));
        }
        let stats = RunStats {
            total_points: checks.len(),
            clean_points: checks.len() - failed.len(),
            max_rate: alg,
            t_eval_min_us: Some(t),
            t_eval_max_us: Some(t),
            threads: rayon::current_num_threads(),
            ..Default::default()
        };
        Ok((outcome, stats))
    }
}

struct Check {
    name: &'static str,
    value: f64,
    limit: f64,
    pass: bool,
    note: String,
}

impl Check {
    fn below(name: &'static str, value: f64, limit: f64) -> Self {
        Check { name, value, limit, pass: value < limit, note: String::new() }
    }
}

fn render(checks: &[Check]) -> String {
    let mut s = format!("{:<28} {:>12} {:>10}  result\n", "check", "value", "limit");
    for c in checks {
        s += &format!(
            "{:<28} {:>12.3e} {:>10.1e}  {}{}\n",
            c.name,
            c.value,
            c.limit,
            if c.pass { "PASS" } else { "FAIL" },
            if c.note.is_empty() { String::new() } else { format!("  ({})", c.note) }
        );
    }
    s
}
