//! The assembled generator against the two level schemes' equations of
//! motion written out term by term.

use gfcount::engine::{flat_index, StateVec, LEN};
use gfcount::{
    assemble_generators, build_double_lambda, build_n_type, DecayRates, DoubleLambdaParams,
    NTypeParams, C64,
};
use proptest::prelude::*;

type M4 = [[C64; 4]; 4];

const I: C64 = C64::new(0.0, 1.0);

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

struct Rates {
    g31: f64,
    g32: f64,
    g41: f64,
    g42: f64,
    g314: f64,
    g324: f64,
}

impl Rates {
    fn big3(&self) -> f64 {
        self.g31 + self.g32
    }
    fn big4(&self) -> f64 {
        self.g41 + self.g42
    }
    fn big34(&self) -> f64 {
        self.g314 + self.g324
    }
}

/// Upper-triangle right-hand sides (1-based `(i, j)` with `i ≤ j`) for the
/// double-Λ scheme; the rest follows from conjugation.
fn double_lambda_rhs(g: &M4, s: f64, r: &Rates, w: f64, op: f64, oc: f64, dp: f64, dc: f64) -> M4 {
    let gg = |i: usize, j: usize| g[i - 1][j - 1];
    let (b3, b4, b34) = (c(r.big3()), c(r.big4()), c(r.big34()));
    let h = I * 0.5;
    let mut o = [[c(0.0); 4]; 4];
    o[0][0] = c(2.0 * s) * (c(r.g31) * gg(3, 3) + c(r.g314) * gg(3, 4) + c(r.g314) * gg(4, 3) + c(r.g41) * gg(4, 4))
        - h * op * (gg(1, 3) + gg(1, 4) - gg(3, 1) - gg(4, 1));
    o[1][1] = c(2.0) * (c(r.g32) * gg(3, 3) + c(r.g324) * gg(3, 4) + c(r.g324) * gg(4, 3) + c(r.g42) * gg(4, 4))
        - h * oc * (gg(2, 3) + gg(2, 4) - gg(3, 2) - gg(4, 2));
    o[2][2] = -c(2.0) * b3 * gg(3, 3) - b34 * (gg(3, 4) + gg(4, 3))
        - h * op * (gg(3, 1) - gg(1, 3))
        - h * oc * (gg(3, 2) - gg(2, 3));
    o[3][3] = -c(2.0) * b4 * gg(4, 4) - b34 * (gg(3, 4) + gg(4, 3))
        - h * op * (gg(4, 1) - gg(1, 4))
        - h * oc * (gg(4, 2) - gg(2, 4));
    o[0][1] = -I * (dp - dc) * gg(1, 2) - h * oc * (gg(1, 3) + gg(1, 4)) + h * op * (gg(3, 2) + gg(4, 2));
    o[0][2] = -I * dp * gg(1, 3) - b3 * gg(1, 3) - b34 * gg(1, 4)
        - h * op * (gg(1, 1) - gg(3, 3) - gg(4, 3))
        - h * oc * gg(1, 2);
    o[0][3] = -I * (dp - w) * gg(1, 4) - b34 * gg(1, 3) - b4 * gg(1, 4)
        - h * op * (gg(1, 1) - gg(3, 4) - gg(4, 4))
        - h * oc * gg(1, 2);
    o[1][2] = -I * dc * gg(2, 3) - b3 * gg(2, 3) - b34 * gg(2, 4)
        - h * oc * (gg(2, 2) - gg(3, 3) - gg(4, 3))
        - h * op * gg(2, 1);
    o[1][3] = -I * (dc - w) * gg(2, 4) - b34 * gg(2, 3) - b4 * gg(2, 4)
        - h * oc * (gg(2, 2) - gg(3, 4) - gg(4, 4))
        - h * op * gg(2, 1);
    o[2][3] = I * w * gg(3, 4) - b34 * (gg(3, 3) + gg(4, 4)) - (b3 + b4) * gg(3, 4)
        - h * op * (gg(3, 1) - gg(1, 4))
        - h * oc * (gg(3, 2) - gg(2, 4));
    o
}

#[allow(clippy::too_many_arguments)]
fn n_type_rhs(
    g: &M4,
    s: f64,
    r: &Rates,
    op: f64,
    oc: f64,
    os: f64,
    dp: f64,
    dc: f64,
    ds: f64,
) -> M4 {
    let gg = |i: usize, j: usize| g[i - 1][j - 1];
    let (b3, b4, b34) = (c(r.big3()), c(r.big4()), c(r.big34()));
    let h = I * 0.5;
    let mut o = [[c(0.0); 4]; 4];
    o[0][0] = c(2.0 * s) * (c(r.g31) * gg(3, 3) + c(r.g314) * gg(3, 4) + c(r.g314) * gg(4, 3) + c(r.g41) * gg(4, 4))
        - h * op * (gg(1, 3) - gg(3, 1));
    o[1][1] = c(2.0) * (c(r.g32) * gg(3, 3) + c(r.g324) * gg(3, 4) + c(r.g324) * gg(4, 3) + c(r.g42) * gg(4, 4))
        - h * oc * (gg(2, 3) - gg(3, 2))
        - h * os * (gg(2, 4) - gg(4, 2));
    o[2][2] = -c(2.0) * b3 * gg(3, 3) - b34 * (gg(3, 4) + gg(4, 3))
        - h * op * (gg(3, 1) - gg(1, 3))
        - h * oc * (gg(3, 2) - gg(2, 3));
    o[3][3] = -c(2.0) * b4 * gg(4, 4) - b34 * (gg(3, 4) + gg(4, 3)) - h * os * (gg(4, 2) - gg(2, 4));
    o[0][1] = -I * (dp - dc) * gg(1, 2) - h * (oc * gg(1, 3) + os * gg(1, 4) - op * gg(3, 2));
    o[0][2] = -I * dp * gg(1, 3) - b3 * gg(1, 3) - b34 * gg(1, 4)
        - h * op * (gg(1, 1) - gg(3, 3))
        - h * oc * gg(1, 2);
    o[0][3] = -I * (dp - dc + ds) * gg(1, 4) - b34 * gg(1, 3) - b4 * gg(1, 4)
        - h * (os * gg(1, 2) - op * gg(3, 4));
    o[1][2] = -I * dc * gg(2, 3) - b3 * gg(2, 3) - b34 * gg(2, 4)
        - h * oc * (gg(2, 2) - gg(3, 3))
        - h * (op * gg(2, 1) - os * gg(4, 3));
    o[1][3] = -I * ds * gg(2, 4) - b34 * gg(2, 3) - b4 * gg(2, 4)
        - h * os * (gg(2, 2) - gg(4, 4))
        + h * oc * gg(3, 4);
    o[2][3] = -I * (ds - dc) * gg(3, 4) - b34 * (gg(3, 3) + gg(4, 4)) - (b3 + b4) * gg(3, 4)
        - h * (os * gg(3, 2) - op * gg(1, 4) - oc * gg(2, 4));
    o
}

/// Completes the lower triangle: `RHS_ji(G) = conj(RHS_ij(G†))`.
fn full_rhs(g: &M4, upper: impl Fn(&M4) -> M4) -> M4 {
    let mut out = upper(g);
    let mut gd = [[c(0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            gd[i][j] = g[j][i].conj();
        }
    }
    let dag = upper(&gd);
    for i in 0..4 {
        for j in 0..i {
            out[i][j] = dag[j][i].conj();
        }
    }
    out
}

fn flat(g: &M4) -> StateVec {
    let mut v = StateVec::zeros();
    for i in 0..4 {
        for j in 0..4 {
            v[flat_index(i, j)] = g[i][j];
        }
    }
    v
}

fn arb_matrix() -> impl Strategy<Value = M4> {
    proptest::collection::vec(-1.0f64..1.0, 32).prop_map(|v| {
        let mut m = [[c(0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let k = 2 * (4 * i + j);
                m[i][j] = C64::new(v[k], v[k + 1]);
            }
        }
        m
    })
}

fn assert_close(expected: &M4, got: &StateVec) {
    let e = flat(expected);
    for k in 0..LEN {
        assert!(
            (e[k] - got[k]).norm() < 1e-9 * (1.0 + e[k].norm()),
            "component {k}: expected {}, assembled {}",
            e[k],
            got[k]
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn double_lambda_matches_written_equations(
        g in arb_matrix(),
        s in -1.0f64..2.0,
        beta in 0.0f64..=1.0,
        op in 0.0f64..900.0,
        oc in 0.0f64..900.0,
        dp in -1000.0f64..1000.0,
        dc in -1000.0f64..1000.0,
        w in 0.0f64..1000.0,
    ) {
        let params = DoubleLambdaParams { beta, omega: w, omega_p: op, omega_c: oc, delta_p: dp, delta_c: dc, rates: DecayRates::D1 };
        let (m, d) = build_double_lambda(&params).unwrap();
        let gen = assemble_generators(&m, &d).unwrap();
        let r = Rates { g31: 1.4375, g32: 1.4375, g41: 1.4375, g42: 1.4375, g314: m.gamma314(), g324: m.gamma324() };
        let expected = full_rhs(&g, |g| double_lambda_rhs(g, s, &r, w, op, oc, dp, dc));
        let mut out = [c(0.0); LEN];
        gen.apply(s, flat(&g).as_slice(), &mut out);
        assert_close(&expected, &StateVec::from_column_slice(&out));
    }

    #[test]
    fn n_type_matches_written_equations(
        g in arb_matrix(),
        s in -1.0f64..2.0,
        beta in 0.0f64..=1.0,
        op in 0.0f64..30.0,
        oc in 0.0f64..30.0,
        os in 0.0f64..30.0,
        dp in -50.0f64..50.0,
        dc in -50.0f64..50.0,
        ds in -50.0f64..50.0,
        rates in proptest::array::uniform4(0.1f64..3.0),
    ) {
        let rates = DecayRates { gamma31: rates[0], gamma32: rates[1], gamma41: rates[2], gamma42: rates[3] };
        let params = NTypeParams { rates, beta, omega_p: op, omega_c: oc, omega_s: os, delta_p: dp, delta_c: dc, delta_s: ds };
        let (m, d) = build_n_type(&params).unwrap();
        let gen = assemble_generators(&m, &d).unwrap();
        let r = Rates {
            g31: rates.gamma31, g32: rates.gamma32, g41: rates.gamma41, g42: rates.gamma42,
            g314: m.gamma314(), g324: m.gamma324(),
        };
        let expected = full_rhs(&g, |g| n_type_rhs(g, s, &r, op, oc, os, dp, dc, ds));
        let mut out = [c(0.0); LEN];
        gen.apply(s, flat(&g).as_slice(), &mut out);
        assert_close(&expected, &StateVec::from_column_slice(&out));
    }
}
