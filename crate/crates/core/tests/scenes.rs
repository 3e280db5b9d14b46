use std::f64::consts::FRAC_PI_2;

use holo2d::geometry::{RayGeometry, RaySign, Vec2};
use holo2d::recover::RecoverySettings;
use holo2d::scenes::{sample_ray, MultipoleScene, RayMeta, Scene, Translated};
use holo2d::specfun::hankel_seq;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mixed(kappa: f64) -> MultipoleScene {
    MultipoleScene::new(
        kappa,
        Vec2::new(0.0, kappa),
        [(0, c(1.0, 0.0)), (1, c(0.5, 0.0)), (2, c(0.25, 0.0)), (-3, c(0.1, 0.2))],
    )
    .unwrap()
}

#[test]
fn intensity_is_nonnegative_and_trivial_without_scattering() {
    let scene = mixed(1.0);
    let empty = MultipoleScene::empty(1.0, Vec2::new(0.0, 1.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let x = Vec2::new(rng.gen_range(-60.0..60.0), rng.gen_range(-60.0..60.0));
        if x.norm() < 1e-3 {
            continue;
        }
        assert!(scene.intensity(x).unwrap() >= 0.0);
        assert!((empty.intensity(x).unwrap() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn intensity_approaches_one_along_a_ray() {
    let scene = mixed(1.0);
    let dir = Vec2::from_angle(0.4);
    let dev: Vec<f64> = [1e2, 1e4, 1e6]
        .iter()
        .map(|&r| {
            let x = dir * r;
            (scene.intensity(x).unwrap() - 1.0).abs() * r.sqrt()
        })
        .collect();
    // sqrt(r) |I - 1| stays bounded while |I - 1| itself shrinks.
    assert!(dev.iter().all(|&d| d < 4.0), "{dev:?}");
}

#[test]
fn radiation_condition_defect_decreases() {
    let scene = mixed(1.3);
    let dir = Vec2::from_angle(-1.1);
    let kappa = 1.3;
    let phi = dir.angle();
    // Radial derivative from H_n' = H_{n-1} - (n/z) H_n and H_0' = -H_1.
    let defect = |r: f64| {
        let z = kappa * r;
        let h = hankel_seq(4, z).unwrap();
        let d: Complex64 = scene
            .modes()
            .map(|(m, a)| {
                let n = m.unsigned_abs() as usize;
                let dh = if n == 0 {
                    -h[1]
                } else {
                    h[n - 1] - h[n] * (n as f64 / z)
                };
                a * kappa * dh * Complex64::from_polar(1.0, m as f64 * phi)
            })
            .sum();
        (r.sqrt() * (d - c(0.0, kappa) * scene.psi1(dir * r).unwrap())).norm()
    };
    let values: Vec<f64> = [1e2, 1e3, 1e4].iter().map(|&r| defect(r)).collect();
    assert!(values[1] < values[0] && values[2] < values[1], "{values:?}");
}

#[test]
fn scattered_field_solves_helmholtz() {
    let scene = mixed(1.0);
    let lap_residual = |x: Vec2, h: f64| {
        let p = |dx: f64, dy: f64| scene.psi1(x + Vec2::new(dx, dy)).unwrap();
        let lap = (p(h, 0.0) + p(-h, 0.0) + p(0.0, h) + p(0.0, -h) - 4.0 * p(0.0, 0.0)) / (h * h);
        (lap + p(0.0, 0.0)).norm()
    };
    for x in [Vec2::new(1.5, 0.5), Vec2::new(-4.0, 3.0), Vec2::new(10.0, -7.0)] {
        let coarse = lap_residual(x, 0.02);
        let fine = lap_residual(x, 0.01);
        let rate = (coarse / fine).log2();
        assert!((rate - 2.0).abs() < 0.2, "{x}: {coarse:e} {fine:e}");
    }
}

#[test]
fn exact_expansion_equals_the_field() {
    let scene = mixed(0.8);
    let karp = scene.exact_karp().unwrap();
    for (r, phi) in [(1.0, 0.1), (3.0, 2.0), (17.0, -2.5), (250.0, 1.0)] {
        let direct = scene.psi1(Vec2::from_angle(phi) * r).unwrap();
        assert!((karp.eval(r, phi).unwrap() - direct).norm() <= 1e-12 * direct.norm());
    }
}

#[test]
fn monopole_rays_sample_cleanly() {
    let scene = MultipoleScene::new(1.0, Vec2::new(0.0, 1.0), [(0, c(1.0, 0.0))]).unwrap();
    let g = RayGeometry::new(Vec2::default(), Vec2::new(1.0, 0.0), RaySign::Plus, FRAC_PI_2).unwrap();
    let meta = RayMeta::new(1.0, Vec2::new(0.0, 1.0), g, Vec2::default()).unwrap();
    let radii: Vec<f64> = (0..16).map(|i| 1e2 * 10f64.powf(3.0 * i as f64 / 15.0)).collect();
    let data = sample_ray(&scene, meta, &radii).unwrap();
    assert_eq!(data.rows.len(), 32);
    assert!(data.rows.iter().all(|&(_, v)| v.is_finite() && v > 0.0));
    assert_eq!(data.paired_radii().len(), 16);
}

#[test]
fn shifted_sampling_uses_translated_points() {
    let scene = mixed(1.0);
    let q = Vec2::new(3.0, -2.0);
    let k = Vec2::new(0.0, 1.0);
    let g0 = RayGeometry::new(Vec2::default(), Vec2::new(1.0, 0.0), RaySign::Minus, FRAC_PI_2).unwrap();
    let g1 = RayGeometry { base: q, ..g0 };
    let m0 = RayMeta::new(1.0, k, g0, Vec2::default()).unwrap();
    let m1 = RayMeta::new(1.0, k, g1, q).unwrap();
    let radii = [5.0, 12.0, 40.0];
    let a = sample_ray(&scene, m1, &radii).unwrap();
    for &(s, v) in &a.rows {
        assert_eq!(v, scene.intensity(q - Vec2::new(s, 0.0)).unwrap());
    }
    let moved = Translated::new(&scene, q);
    let b = sample_ray(&moved, m1, &radii).unwrap();
    let c0 = sample_ray(&scene, m0, &radii).unwrap();
    for (u, w) in b.rows.iter().zip(&c0.rows) {
        assert!((u.1 - w.1).abs() < 1e-13);
    }
}

#[test]
fn default_ladders_cover_every_order() {
    let settings = RecoverySettings::default();
    let k = Vec2::new(0.0, 1.0);
    for deg in [20.0f64, 60.0, 135.0] {
        let theta = Vec2::from_angle(deg.to_radians());
        let tau = holo2d::geometry::default_tau(1.0, k, theta);
        let g = RayGeometry::new(Vec2::default(), theta, RaySign::Plus, tau).unwrap();
        let meta = RayMeta::new(1.0, k, g, Vec2::default()).unwrap();
        for n in 0..=3 {
            assert!(
                settings.lattice(&meta, n).len() >= holo2d::recover::MIN_LATTICE.min(settings.window(n).count),
                "theta {deg} order {n}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_is_linear_in_amplitudes(re in -2.0f64..2.0, im in -2.0f64..2.0, x in 0.5f64..40.0, y in -40.0f64..40.0) {
        let scene = mixed(1.0);
        let factor = c(re, im);
        let p = Vec2::new(x, y);
        let lhs = scene.scaled(factor).psi1(p).unwrap();
        let rhs = factor * scene.psi1(p).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-13 * (1.0 + rhs.norm()));
    }

    #[test]
    fn json_roundtrip(modes in prop::collection::btree_map(-20i64..=20, (-5.0f64..5.0, -5.0f64..5.0), 0..6), angle in 0.0f64..std::f64::consts::TAU, kappa in 0.1f64..10.0) {
        let scene = MultipoleScene::new(
            kappa,
            Vec2::from_angle(angle) * kappa,
            modes.into_iter().map(|(m, (re, im))| (m, c(re, im))),
        ).unwrap();
        prop_assert_eq!(MultipoleScene::from_json(&scene.to_json()).unwrap(), scene);
    }
}
