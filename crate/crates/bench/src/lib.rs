//! Shared benchmark configurations.

use gfcount::{
    build_double_lambda, build_n_type, AtomModel, DoubleLambdaParams, DriveConfig, NTypeParams,
};

/// Giant-Kerr point at resonance.
pub fn kerr() -> (AtomModel, DriveConfig) {
    build_n_type(&NTypeParams::default()).expect("valid defaults")
}

/// Double-Λ with full SGC at a bright detuning pair.
pub fn double_lambda_bright() -> (AtomModel, DriveConfig) {
    let omega = 814.5;
    build_double_lambda(&DoubleLambdaParams {
        beta: 1.0,
        delta_p: -0.5 * omega,
        delta_c: 0.3 * omega,
        ..Default::default()
    })
    .expect("valid parameters")
}
