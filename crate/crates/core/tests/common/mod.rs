#![allow(dead_code)]

use gfcount::{
    build_double_lambda, build_n_type, AtomModel, DoubleLambdaParams, DriveConfig, NTypeParams,
};

pub const OMEGA: f64 = 814.5;

pub fn n_type(omega_c: f64, omega_s: f64, beta: f64, delta_p: f64) -> (AtomModel, DriveConfig) {
    build_n_type(&NTypeParams {
        omega_c,
        omega_s,
        beta,
        delta_p,
        ..Default::default()
    })
    .unwrap()
}

pub fn double_lambda(beta: f64, delta_p: f64, delta_c: f64) -> (AtomModel, DriveConfig) {
    build_double_lambda(&DoubleLambdaParams {
        beta,
        delta_p,
        delta_c,
        ..Default::default()
    })
    .unwrap()
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
