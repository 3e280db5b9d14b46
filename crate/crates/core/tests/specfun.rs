#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use holo2d::specfun::{asym_coeff, h0_zeros, hankel0, hankel01, hankel1, hankel_m};
use num_complex::Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Ascending series for J0, Y0, J1, Y1 (accurate for small real x).
fn series_oracle(x: f64) -> (f64, f64, f64, f64) {
    let q = -(x * x) / 4.0;
    let half = x / 2.0;
    let (mut j0, mut j1) = (0.0, 0.0);
    let (mut y0_sum, mut y1_sum) = (0.0, 0.0);
    let mut term0 = 1.0; // q^k / (k!)^2
    let mut term1 = half; // (x/2) q^k / (k! (k+1)!)
    let mut psi_k1 = -EULER_GAMMA; // psi(k+1)
    for k in 0..40 {
        let psi_k2 = psi_k1 + 1.0 / (k as f64 + 1.0); // psi(k+2)
        j0 += term0;
        j1 += term1;
        y0_sum += 2.0 * psi_k1 * term0;
        y1_sum += (psi_k1 + psi_k2) * term1;
        let kk = k as f64 + 1.0;
        term0 *= q / (kk * kk);
        term1 *= q / (kk * (kk + 1.0));
        psi_k1 = psi_k2;
    }
    let log = (x / 2.0).ln();
    let y0 = 2.0 / PI * log * j0 - y0_sum / PI;
    let y1 = -2.0 / (PI * x) + 2.0 / PI * log * j1 - y1_sum / PI;
    (j0, y0, j1, y1)
}

/// Composite 5-point Gauss-Legendre rule.
fn gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const NODES: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_47,
        0.478_628_670_499_366_47,
        0.236_926_885_056_189_08,
        0.236_926_885_056_189_08,
    ];
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            total += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * total
}

/// Bessel integral representations for integer order `n`.
fn integral_oracle(n: u32, x: f64) -> Complex64 {
    let nf = n as f64;
    let j = gauss(|t| (nf * t - x * t.sin()).cos(), 0.0, PI, 400) / PI;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let y = gauss(|t| (x * t.sin() - nf * t).sin(), 0.0, PI, 400) / PI
        - gauss(
            |t| ((nf * t).exp() + sign * (-nf * t).exp()) * (-x * t.sinh()).exp(),
            0.0,
            8.0,
            800,
        ) / PI;
    c(j, y)
}

// (x, Re H0, Im H0, Re H1, Im H1) from a 40-digit independent evaluation.
const REAL_REFERENCE: [(f64, f64, f64, f64, f64); 13] = [
    (
        0.001,
        0.99999975000001562,
        -4.4714166113759233,
        0.00049999993750000261,
        -636.62216723113941,
    ),
    (
        0.05,
        0.99937509764946858,
        -1.9793110008172096,
        0.024992188313759701,
        -12.78985517117497,
    ),
    (
        0.5,
        0.9384698072408129,
        -0.44451873350670656,
        0.24226845767487389,
        -1.4714723926702431,
    ),
    (
        1.0,
        0.76519768655796655,
        0.088256964215676958,
        0.44005058574493352,
        -0.78121282130028872,
    ),
    (
        2.5,
        -0.048383776468197996,
        0.49807035961523189,
        0.49709410246427404,
        0.1459181379667858,
    ),
    (
        7.3,
        0.2882169476350144,
        0.062773886374037598,
        0.082570430493257831,
        -0.28459437186807211,
    ),
    (
        12.0,
        0.047689310796833537,
        -0.22523731263436143,
        -0.22344710449062761,
        -0.057099218260896521,
    ),
    (
        17.0,
        -0.16985425215118355,
        -0.092637198442323693,
        -0.09766849275778065,
        0.16720503607723369,
    ),
    (
        19.9,
        0.17287775639261846,
        0.045762094159385479,
        0.050117424807379741,
        -0.17178303121049256,
    ),
    (
        20.1,
        0.15953606793729709,
        0.078810592428750293,
        0.082801005760209763,
        -0.15762598074781154,
    ),
    (
        50.0,
        0.055812327669251815,
        -0.098064995470077079,
        -0.097511828125175138,
        -0.056795668562014768,
    ),
    (
        333.3,
        0.038466654416718675,
        -0.020745232486426935,
        -0.020687550206813365,
        -0.038497818590544024,
    ),
    (
        10000.0,
        -0.0070961603533888015,
        0.0036478055589866059,
        0.0036474507555295803,
        0.0070963427525364951,
    ),
];

// (Re z, Im z, Re H0, Im H0, Re H1, Im H1); the last row is the limit from
// below on the negative real axis.
const COMPLEX_REFERENCE: [(f64, f64, f64, f64, f64, f64); 6] = [
    (
        3.0,
        -2.0,
        -2.4806764889108498,
        1.9487869886126249,
        1.5052301018211929,
        2.5468314017024478,
    ),
    (
        -4.0,
        -0.5,
        -1.1303208401323195,
        0.077060143661117566,
        0.19644670234597515,
        0.14804955506583252,
    ),
    (
        25.0,
        -5.0,
        15.939897309600637,
        -17.230363604811413,
        -16.859607180373323,
        -16.213995536466367,
    ),
    (
        -30.0,
        -0.3,
        -0.24461795046773306,
        -0.014220232016987632,
        0.33617627204284789,
        -0.012837352985387866,
    ),
    (
        0.2,
        -0.1,
        1.3020050390529139,
        -1.0019708311900147,
        1.3365600092236669,
        -2.744686987855444,
    ),
    (
        -7.0,
        0.0,
        0.90023781155866679,
        -0.025949743967209265,
        0.014048470447037498,
        0.30266723702418487,
    ),
];

const ORDER_REFERENCE: [(u32, f64, f64, f64); 5] = [
    (5, 10.0, -0.23406152818679364, 0.1354030476893623),
    (10, 1.0, 2.6306151236874532e-10, -1.2161801427868919e+8),
    (10, 50.0, -0.11384784914946939, 0.0057238971820535135),
    (20, 30.0, 0.0048310199934040645, -0.16848153948742677),
    (3, 0.7, 0.0069296548267508395, -15.819479052819636),
];

#[test]
fn values_at_one_match_series_oracle() {
    let (j0, y0, j1, y1) = series_oracle(1.0);
    let (h0, h1) = hankel01(c(1.0, 0.0)).unwrap();
    assert!(rel(h0, c(j0, y0)) < 1e-12, "{h0} vs {j0} {y0}");
    assert!(rel(h1, c(j1, y1)) < 1e-12, "{h1} vs {j1} {y1}");
    assert!(rel(h0, c(0.765197686557967, 0.088256964215677)) < 1e-14);
    assert!(rel(h1, c(0.440050585744934, -0.781212821300289)) < 1e-14);
}

#[test]
fn series_oracle_agrees_on_small_arguments() {
    for &x in &[0.01, 0.1, 0.3, 0.8, 1.5, 2.0] {
        let (j0, y0, j1, y1) = series_oracle(x);
        let (h0, h1) = hankel01(c(x, 0.0)).unwrap();
        assert!(rel(h0, c(j0, y0)) < 1e-12, "H0({x})");
        assert!(rel(h1, c(j1, y1)) < 1e-12, "H1({x})");
    }
}

#[test]
fn real_axis_matches_reference() {
    for &(x, a, b, p, q) in &REAL_REFERENCE {
        let (h0, h1) = hankel01(c(x, 0.0)).unwrap();
        assert!(rel(h0, c(a, b)) < 1e-12, "H0({x}) = {h0}, rel {}", rel(h0, c(a, b)));
        assert!(rel(h1, c(p, q)) < 1e-12, "H1({x}) = {h1}, rel {}", rel(h1, c(p, q)));
    }
}

#[test]
fn lower_half_plane_matches_reference() {
    for &(x, y, a, b, p, q) in &COMPLEX_REFERENCE {
        let (h0, h1) = hankel01(c(x, y)).unwrap();
        assert!(rel(h0, c(a, b)) < 1e-12, "H0({x}{y:+}i) = {h0}");
        assert!(rel(h1, c(p, q)) < 1e-12, "H1({x}{y:+}i) = {h1}");
    }
}

#[test]
fn integer_orders_match_reference() {
    for &(m, x, a, b) in &ORDER_REFERENCE {
        let h = hankel_m(m, x).unwrap();
        assert!(rel(h, c(a, b)) < 1e-11, "H{m}({x}) = {h}");
    }
}

#[test]
fn order_five_matches_integral_oracle() {
    let oracle = integral_oracle(5, 10.0);
    let h = hankel_m(5, 10.0).unwrap();
    assert!(rel(h, oracle) < 1e-11, "{h} vs {oracle}");
    // The oracle itself reproduces the low orders.
    assert!(rel(integral_oracle(0, 3.0), hankel0(c(3.0, 0.0)).unwrap()) < 1e-11);
}

#[test]
fn wronskian_on_log_grid() {
    for i in 0..200 {
        let r = 0.05 * (500.0_f64 / 0.05).powf(i as f64 / 199.0);
        let (h0, h1) = hankel01(c(r, 0.0)).unwrap();
        let w = (h0.conj() * h1).im;
        let residual = (w + 2.0 / (PI * r)).abs();
        assert!(residual < 1e-12 * (1.0 + 1.0 / r), "r = {r}, residual {residual:e}");
    }
}

#[test]
fn derivative_identities_by_central_differences() {
    let r = 2.0;
    let errors: Vec<(f64, f64, f64)> = [1e-2, 5e-3]
        .iter()
        .map(|&h| {
            let (a0, a1) = hankel01(c(r - h, 0.0)).unwrap();
            let (m0, m1) = hankel01(c(r, 0.0)).unwrap();
            let (b0, b1) = hankel01(c(r + h, 0.0)).unwrap();
            let d0 = (b0 - a0) / (2.0 * h);
            let dd0 = (b0 - 2.0 * m0 + a0) / (h * h);
            let dd1 = (b1 - 2.0 * m1 + a1) / (h * h);
            let d1 = (b1 - a1) / (2.0 * h);
            // H0' = -H1, H0'' = H1/r - H0, H1' = -H0'', H1'' = -(H1/r - H0)'
            let e1 = (d0 + m1).norm();
            let e2 = (dd0 - (m1 / r - m0)).norm();
            let e3 = (d1 + dd0).norm();
            let e4 = (dd1 + d1 / r - m1 / (r * r) - d0).norm();
            (e1, e2, e3.max(e4))
        })
        .collect();
    for (coarse, fine) in [
        (errors[0].0, errors[1].0),
        (errors[0].1, errors[1].1),
        (errors[0].2, errors[1].2),
    ] {
        let ratio = coarse / fine;
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }
    let h = 1e-5;
    let d = (hankel0(c(r + h, 0.0)).unwrap() - hankel0(c(r - h, 0.0)).unwrap()) / (2.0 * h);
    assert!((d + hankel1(c(r, 0.0)).unwrap()).norm() < 1e-9);
}

#[test]
fn truncated_asymptotic_series_is_consistent() {
    for nu in 0..=1u32 {
        for &r in &[50.0, 80.0, 200.0] {
            let exact = if nu == 0 {
                hankel0(c(r, 0.0)).unwrap()
            } else {
                hankel1(c(r, 0.0)).unwrap()
            };
            for terms in 1..=5u32 {
                let mut sum = Complex64::new(0.0, 0.0);
                for j in 0..=terms {
                    sum += asym_coeff(nu, j).unwrap() / r.powi(j as i32);
                }
                let shift = r - nu as f64 * PI / 2.0 - PI / 4.0;
                let approx = (2.0 / (PI * r)).sqrt() * c(shift.cos(), shift.sin()) * sum;
                let bound = 2.0 * asym_coeff(nu, terms + 1).unwrap().norm() / r.powi(terms as i32 + 1)
                    * (2.0 / (PI * r)).sqrt();
                assert!((approx - exact).norm() <= bound.max(1e-15), "nu {nu} r {r} J {terms}");
            }
        }
    }
    // Leading behaviour at r = 1e4.
    let r = 1e4;
    let shift = r - PI / 4.0;
    let approx = (2.0 / (PI * r)).sqrt()
        * c(shift.cos(), shift.sin())
        * (Complex64::new(1.0, 0.0) + asym_coeff(0, 1).unwrap() / r);
    assert!((approx - hankel0(c(r, 0.0)).unwrap()).norm() < 1e-10);
}

#[test]
fn zeros_lie_below_axis_and_vanish() {
    let zeros = h0_zeros(8).unwrap();
    assert_eq!(zeros.len(), 8);
    for (i, z) in zeros.iter().enumerate() {
        let (h0, h1) = hankel01(*z).unwrap();
        assert!(z.im < 0.0);
        assert!(h0.norm() < 1e-10, "|H0({z})| = {:e}", h0.norm());
        assert!((h0 / h1).norm() < 1e-8);
        if i > 0 {
            assert!(z.norm() > zeros[i - 1].norm());
            assert!((z - zeros[i - 1]).norm() > 1.0);
        }
    }
}

#[test]
fn twenty_zeros_are_available() {
    let zeros = h0_zeros(20).unwrap();
    assert_eq!(zeros.len(), 20);
    // Spacing approaches pi along the negative real direction.
    let gap = zeros[19] - zeros[18];
    assert!((gap.re + PI).abs() < 1e-2 && gap.im.abs() < 1e-3);
}
