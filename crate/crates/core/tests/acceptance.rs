//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use gfcount::engine::{evolve_flat, MomentBlocks, MomentPropagator};
use gfcount::observables::peaks::{dip_near, fwhm, local_maxima, Peak};
use gfcount::oracle::hierarchy_consistency;
use gfcount::{
    assemble_generators, build_double_lambda, build_n_type, detuning_map_2d,
    evolve_factorial_moments, finite_difference_moments, line_shape_scan, mandel_q,
    null_space_steady_state, AtomModel, DecayRates, DoubleLambdaParams, DriveConfig, GfState,
    NTypeParams, NumericOptions, ScanAxis, ScanParam, ScanResult, Tolerances, C64,
};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

type Outcome = (bool, String);

const GAMMA31: f64 = 1.4375;

fn spectrum(oc: f64, os: f64, beta: f64, lo: f64, hi: f64, n: usize, opts: &NumericOptions) -> (Vec<f64>, ScanResult) {
    let (m, d) = n_type(oc, os, beta, 0.0);
    let axis = ScanAxis::linspace(ScanParam::DeltaP, lo, hi, n).unwrap();
    let x = axis.values.clone();
    (x, line_shape_scan(&m, &d, axis, opts).unwrap())
}

fn no_q() -> NumericOptions {
    NumericOptions { compute_q: false, ..Default::default() }
}

fn outer_separation(peaks: &[Peak]) -> f64 {
    peaks.last().unwrap().x - peaks.first().unwrap().x
}

fn random_configs(kind: usize, n: usize) -> Vec<(AtomModel, DriveConfig)> {
    let mut runner = TestRunner::deterministic();
    let mut out = Vec::new();
    for _ in 0..n {
        let cfg = if kind == 0 {
            let s = (0.0f64..=1.0, -400.0f64..1200.0, -400.0f64..1200.0, 0.0f64..200.0, 0.0f64..900.0);
            let (beta, dp, dc, op, oc) = s.new_tree(&mut runner).unwrap().current();
            build_double_lambda(&DoubleLambdaParams { beta, delta_p: dp, delta_c: dc, omega_p: op, omega_c: oc, ..Default::default() })
        } else {
            let s = (
                0.0f64..=1.0,
                proptest::array::uniform3(-30.0f64..30.0),
                proptest::array::uniform3(0.0f64..30.0),
                proptest::array::uniform4(0.5f64..3.0),
            );
            let (beta, det, rabi, g) = s.new_tree(&mut runner).unwrap().current();
            build_n_type(&NTypeParams {
                beta,
                delta_p: det[0],
                delta_c: det[1],
                delta_s: det[2],
                omega_p: rabi[0],
                omega_c: rabi[1],
                omega_s: rabi[2],
                rates: DecayRates { gamma31: g[0], gamma32: g[1], gamma41: g[2], gamma42: g[3] },
            })
        };
        out.push(cfg.unwrap());
    }
    out
}

fn c1_trace_hermiticity() -> Outcome {
    let t0 = Instant::now();
    let (mut worst_tr, mut worst_h) = (0.0f64, 0.0f64);
    for kind in 0..2 {
        for (m, d) in random_configs(kind, 20) {
            let gen = assemble_generators(&m, &d).unwrap();
            let t_end = 100.0 / m.rates().gamma31;
            let mut y = GfState::ground().to_flat();
            for _ in 0..10 {
                y = evolve_flat(&gen, 1.0, &y, t_end / 10.0, Tolerances::default()).unwrap().0;
                let g = GfState::from_flat(&y, 0.0);
                worst_tr = worst_tr.max((g.trace() - C64::new(1.0, 0.0)).norm());
                worst_h = worst_h.max(g.hermiticity_defect());
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    (
        worst_tr < 1e-8 && worst_h < 1e-8 && secs < 60.0,
        format!("40 configs: max |tr-1| {worst_tr:.1e}, max hermiticity defect {worst_h:.1e}, {secs:.1} s"),
    )
}

fn c2_moment_oracles() -> Outcome {
    let t0 = Instant::now();
    let cases: Vec<(&str, (AtomModel, DriveConfig), f64, usize)> = vec![
        ("EIT peak", n_type(11.0, 0.0, 0.0, 5.5), 50.0, 400),
        ("Kerr centre", n_type(11.0, 14.0, 0.0, 0.0), 50.0, 200),
        ("AT peak", n_type(25.0, 25.0, 0.0, 17.7), 40.0, 150),
        ("double-L b=0", double_lambda(0.0, -0.5 * OMEGA, 0.3 * OMEGA), 10.0, 60),
        ("double-L b=1", double_lambda(1.0, -0.5 * OMEGA, 0.3 * OMEGA), 10.0, 60),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, (m, d), t, n_max) in cases {
        let gen = assemble_generators(&m, &d).unwrap();
        let tol = Tolerances::new(1e-12, 1e-15).unwrap();
        let traj = evolve_factorial_moments(&gen, &GfState::ground(), &[t], tol).unwrap();
        let (n1, n2) = (traj.n1[0], traj.n2[0]);
        let (f1, f2) = finite_difference_moments(&gen, &GfState::ground(), t, 1e-3).unwrap();
        let fd_err = rel_err(f1, n1).max(rel_err(f2, n2));
        let rep = hierarchy_consistency(&gen, &GfState::ground(), t, n_max).unwrap();
        let (h1, h2) = rep.hierarchy_moments;
        let allowance = 1e-6 + (n_max as f64 + 1.0).powi(2) * rep.deficit.abs();
        let pn_ok = !rep.skipped
            && (h1 - n1).abs() <= allowance * n1.max(1.0)
            && (h2 - n2).abs() <= allowance * n2.max(1.0);
        ok &= fd_err < 1e-4 && pn_ok && rep.passed();
        notes.push(format!("{name}: fd {fd_err:.1e}, pn {:.1e}", rel_err(h1, n1).max(rel_err(h2, n2))));
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    (ok, format!("{}; {secs:.1} s", notes.join("; ")))
}

fn c3_rate_identity() -> Outcome {
    let mut worst = 0.0f64;
    let mut used = 0;
    for os in [0.0, 14.0] {
        let (x, scan) = spectrum(11.0, os, 0.0, -20.0, 20.0, 201, &no_q());
        for (k, p) in scan.points.iter().enumerate() {
            if !p.converged {
                continue;
            }
            used += 1;
            let (m, d) = n_type(11.0, os, 0.0, x[k]);
            let gen = assemble_generators(&m, &d).unwrap();
            let alg = null_space_steady_state(&gen).unwrap().emission_rate(&gen);
            worst = worst.max((p.rate - alg).abs() / p.rate.abs().max(1e-6));
        }
    }
    (worst < 1e-3, format!("{used} converged points, max relative deviation {worst:.1e}"))
}

fn c4_eit_dip() -> Outcome {
    let (x, scan) = spectrum(11.0, 0.0, 0.0, -20.0, 20.0, 201, &no_q());
    let y = scan.intensities();
    let centre = y[100];
    let peaks = local_maxima(&x, &y, 0.5);
    let ok_peaks = peaks.len() == 2
        && rel_err(-peaks[0].x, 5.5) < 0.1
        && rel_err(peaks[1].x, 5.5) < 0.1
        && (peaks[0].x + peaks[1].x).abs() < 0.05 * 5.5;
    (
        centre < 0.01 && ok_peaks,
        format!(
            "I(0) = {centre:.1e}, peaks at {:?}",
            peaks.iter().map(|p| format!("{:.3}", p.x)).collect::<Vec<_>>()
        ),
    )
}

fn c5_kerr() -> Outcome {
    let (x, scan) = spectrum(11.0, 14.0, 0.0, -20.0, 20.0, 201, &no_q());
    let y = scan.intensities();
    let central = local_maxima(&x, &y, 0.0).into_iter().find(|p| p.x.abs() < 0.5);
    let height = central.map_or(0.0, |p| p.height);
    let mut qs = Vec::new();
    for op in [1.5, 15.0] {
        let (m, mut d) = n_type(11.0, 14.0, 0.0, 0.0);
        d.omega_p = op;
        let q = mandel_q(&m, &d, &NumericOptions::default()).unwrap();
        qs.push((q.q.value().unwrap_or(f64::NAN), q.converged));
    }
    let ok = height > 0.2 && qs.iter().all(|&(q, c)| q < 0.0 && c);
    (ok, format!("central peak {height:.3}, Q(0) = {:.4} (Op=1.5), {:.4} (Op=15)", qs[0].0, qs[1].0))
}

fn c6_at_separation() -> Outcome {
    let mut seps = Vec::new();
    for (oc, os) in [(25.0, 25.0), (11.0, 14.0), (24.0, 14.0)] {
        let (x, scan) = spectrum(oc, os, 0.0, -30.0, 30.0, 241, &no_q());
        let peaks = local_maxima(&x, &scan.intensities(), 0.2);
        let sep = outer_separation(&peaks);
        seps.push((sep, sep / f64::hypot(oc, os)));
    }
    let ok = rel_err(seps[0].0, 35.36) < 0.05
        && seps[1..].iter().all(|s| rel_err(s.1, seps[0].1) < 0.1);
    (
        ok,
        format!(
            "separations {:.2}, {:.2}, {:.2} MHz; ratio to sqrt(Oc^2+Os^2) {:.3}, {:.3}, {:.3}",
            seps[0].0, seps[1].0, seps[2].0, seps[0].1, seps[1].1, seps[2].1
        ),
    )
}

struct Maps {
    grid: Vec<f64>,
    beta0: ScanResult,
    beta1: ScanResult,
    seconds_beta1: f64,
}

fn maps() -> Maps {
    let grid = linspace(-0.5 * OMEGA, 1.5 * OMEGA, 121);
    let (m0, d0) = double_lambda(0.0, 0.0, 0.0);
    let beta0 = detuning_map_2d(&m0, &d0, grid.clone(), grid.clone(), &no_q()).unwrap();
    let (m1, d1) = double_lambda(1.0, 0.0, 0.0);
    let t0 = Instant::now();
    let beta1 = detuning_map_2d(&m1, &d1, grid.clone(), grid.clone(), &NumericOptions::default()).unwrap();
    Maps { grid, beta0, beta1, seconds_beta1: t0.elapsed().as_secs_f64() }
}

fn c7_vat(maps: &Maps) -> Outcome {
    let k = maps.grid.iter().position(|&v| (v - 0.5 * OMEGA).abs() < 1e-6).unwrap();
    let n = maps.grid.len();
    let row_max = |s: &ScanResult| s.row(k).iter().map(|p| p.intensity).fold(0.0, f64::max);
    let col_max = |s: &ScanResult| (0..n).map(|j| s.at(k, j).intensity).fold(0.0, f64::max);
    let (r1, c1, r0, c0) = (row_max(&maps.beta1), col_max(&maps.beta1), row_max(&maps.beta0), col_max(&maps.beta0));
    (
        r1 < 0.05 && c1 < 0.05 && r0 > 0.5,
        format!("b=1 row max {r1:.1e}, column max {c1:.1e}; b=0 row max {r0:.3} (column max {c0:.3})"),
    )
}

fn c8_diagonal(maps: &Maps) -> Outcome {
    let n = maps.grid.len();
    let mut worst = 0.0f64;
    for j in 0..n {
        let row_max = maps.beta0.row(j).iter().map(|p| p.intensity).fold(0.0, f64::max);
        worst = worst.max(maps.beta0.at(j, j).intensity / row_max);
    }
    (worst < 0.05, format!("max diagonal / row max = {worst:.1e}"))
}

fn c9_sgc() -> Outcome {
    let opts = NumericOptions { t_max: Some(2e4), compute_q: false, ..Default::default() };
    let centre_rate = |beta| spectrum(25.0, 25.0, beta, -40.0, 40.0, 321, &opts).1.at(160, 0).rate;
    let ratio = centre_rate(1.0) / centre_rate(0.0);
    let shape = |beta| {
        let (x, scan) = spectrum(10.0, 25.0, beta, -40.0, 40.0, 321, &opts);
        let y = scan.intensities();
        let peaks = local_maxima(&x, &y, 0.01);
        let c = peaks.iter().find(|p| p.x.abs() < 0.5).copied().unwrap();
        let side = peaks.iter().filter(|p| p.x.abs() > 5.0).map(|p| p.height).fold(0.0, f64::max);
        (fwhm(&x, &y, c.index).unwrap(), c.height / side, scan.all_clean())
    };
    let (w0, h0, clean0) = shape(0.0);
    let (w1, h1, clean1) = shape(1.0);
    (
        ratio < 0.02 && w1 < w0 && h1 > h0 && clean0 && clean1,
        format!("centre b=1/b=0 = {ratio:.4}; Oc=10: FWHM {w0:.2} -> {w1:.2} MHz, centre/AT {h0:.2} -> {h1:.2}"),
    )
}

fn c10_q_hole() -> Outcome {
    // Q at a fixed observation time; the hole sits where ⟨N⟩ stays tiny.
    let t_eval = 1000.0;
    let x = linspace(-2.0, 2.0, 401);
    let q: Vec<f64> = x
        .iter()
        .map(|&dp| {
            let (m, d) = n_type(11.0, 0.0, 0.0, dp);
            let gen = assemble_generators(&m, &d).unwrap();
            let b = MomentPropagator::new(&gen, t_eval).unwrap().step(&MomentBlocks::initial(&GfState::ground()));
            b.mandel_q().unwrap()
        })
        .collect();
    let Some(dip) = dip_near(&x, &q, 0.0) else {
        return (false, "no dip in Q at the line centre".into());
    };
    let localized = dip.bottom < 0.75 * dip.shoulder && x[dip.index].abs() < 1e-9;
    (
        localized && dip.width < GAMMA31,
        format!(
            "T = {t_eval} us: Q(0) = {:.4}, shoulders {:.4}, full width at half depth {:.3} MHz (gamma31 = {GAMMA31})",
            dip.bottom, dip.shoulder, dip.width
        ),
    )
}

fn c11_runtime(maps: &Maps) -> Outcome {
    let t0 = Instant::now();
    let (_, scan) = spectrum(11.0, 14.0, 0.0, -20.0, 20.0, 201, &NumericOptions::default());
    let spec = t0.elapsed().as_secs_f64();
    let threads = rayon::current_num_threads();
    (
        spec < 120.0 && maps.seconds_beta1 < 1800.0 && scan.points.len() == 201,
        format!(
            "201-point spectrum {spec:.1} s; 121x121 map with Q {:.0} s; {threads} worker thread(s)",
            maps.seconds_beta1
        ),
    )
}

struct Runner {
    only: Vec<u32>,
    ok: bool,
}

impl Runner {
    fn wanted(&self, id: u32) -> bool {
        self.only.is_empty() || self.only.contains(&id)
    }

    fn run(&mut self, id: u32, f: impl FnOnce() -> Outcome) {
        if !self.wanted(id) {
            return;
        }
        let t0 = Instant::now();
        let (ok, detail) = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        println!(
            "criterion {id:>2}: {} ({:.1} s) {detail}",
            if ok { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64()
        );
        self.ok &= ok;
    }
}

/// Optional arguments select criteria by number, e.g. `-- 1 5`.
fn main() {
    let only = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut r = Runner { only, ok: true };
    r.run(1, c1_trace_hermiticity);
    r.run(2, c2_moment_oracles);
    r.run(3, c3_rate_identity);
    r.run(4, c4_eit_dip);
    r.run(5, c5_kerr);
    r.run(6, c6_at_separation);
    let maps = if [7, 8, 11].iter().any(|&id| r.wanted(id)) {
        let t0 = Instant::now();
        let m = catch_unwind(maps).ok();
        println!("(detuning maps computed in {:.0} s)", t0.elapsed().as_secs_f64());
        m
    } else {
        None
    };
    let missing = || (false, "map computation failed".to_string());
    r.run(7, || maps.as_ref().map_or_else(missing, c7_vat));
    r.run(8, || maps.as_ref().map_or_else(missing, c8_diagonal));
    r.run(9, c9_sgc);
    r.run(10, c10_q_hole);
    r.run(11, || maps.as_ref().map_or_else(missing, c11_runtime));
    if !r.ok {
        std::process::exit(1);
    }
}
