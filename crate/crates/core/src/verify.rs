//! Self-checks of the whole chain on one multipole scene.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::AngularFunction;
use crate::error::{Error, Result};
use crate::geometry::{default_tau, RayGeometry, RaySign, Vec2};
use crate::karp::{fit_from_samples, helmholtz_residual, KarpExpansion};
use crate::recover::{reconstruct_psi1, recover_farfield, Perturbation, RecoverySettings};
use crate::scenes::{sample_ray, MultipoleScene, RayIntensityData, RayMeta, Scene};
use crate::specfun::{h0_zeros, hankel01};

/// Result of one check.
///
/// Ordinary checks pass when `residual <= tolerance`. Negative controls
/// feed deliberately broken input and pass when the breakage is detected,
/// i.e. when `residual > tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub negative_control: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn push(&mut self, name: &str, residual: f64, tolerance: f64, detail: impl Into<String>) {
        let passed = residual.is_finite() && residual <= tolerance;
        self.checks.push(Check {
            name: name.to_string(),
            residual,
            tolerance,
            passed,
            negative_control: false,
            detail: detail.into(),
        });
    }

    fn control(&mut self, name: &str, residual: f64, tolerance: f64, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            residual,
            tolerance,
            passed: residual > tolerance,
            negative_control: true,
            detail: detail.into(),
        });
    }

    fn run(&mut self, name: &str, tolerance: f64, f: impl FnOnce() -> Result<(f64, String)>) {
        match f() {
            Ok((residual, detail)) => self.push(name, residual, tolerance, detail),
            Err(e) => self.push(name, f64::INFINITY, tolerance, format!("error: {e}")),
        }
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn padded(exp: &KarpExpansion, len: usize) -> (Vec<AngularFunction>, Vec<AngularFunction>) {
    let zero = AngularFunction::zero(exp.truncation());
    let pick = |v: &[AngularFunction]| {
        (0..len)
            .map(|j| v.get(j).cloned().unwrap_or_else(|| zero.clone()))
            .collect()
    };
    (pick(exp.f()), pick(exp.g()))
}

fn ray_pair(
    scene: &MultipoleScene,
    origin: Vec2,
    order: usize,
    settings: &RecoverySettings,
) -> Result<(RayIntensityData, RayIntensityData)> {
    let k = scene.wave_vector();
    let theta = Vec2::new(k.y, -k.x) * (1.0 / k.norm());
    let tau = default_tau(scene.kappa(), k, theta);
    let meta = |sign| -> Result<RayMeta> {
        RayMeta::new(scene.kappa(), k, RayGeometry::new(origin, theta, sign, tau)?, origin)
    };
    let (mp, mm) = (meta(RaySign::Plus)?, meta(RaySign::Minus)?);
    Ok((
        sample_ray(scene, mp, &settings.sampling_radii(&mp, order))?,
        sample_ray(scene, mm, &settings.sampling_radii(&mm, order))?,
    ))
}

/// Runs every check on `scene`. The recovery checks use the line through
/// the origin perpendicular to `k` and far-field orders `0..=order`.
pub fn run_suite(scene: &MultipoleScene, order: usize, settings: &RecoverySettings) -> Result<VerifyReport> {
    settings.check_order(order)?;
    let kappa = scene.kappa();
    let mut s = Suite { checks: Vec::new() };

    s.run("hankel_wronskian", 1e-12, || {
        let mut worst = 0.0f64;
        for i in 0..200 {
            let r = 0.05 * (1e4f64).powf(i as f64 / 199.0);
            let (h0, h1) = hankel01(Complex64::new(r, 0.0))?;
            let w = (h0.conj() * h1).im + 2.0 / (PI * r);
            worst = worst.max(w.abs() / (1.0 + 1.0 / r));
        }
        Ok((worst, "200 radii in [0.05, 500]".to_string()))
    });

    s.run("hankel_zeros", 1e-10, || {
        let zs = h0_zeros(5)?;
        let worst = zs
            .iter()
            .map(|z| hankel01(*z).map(|h| h.0.norm()))
            .collect::<Result<Vec<_>>>()?;
        Ok((worst.into_iter().fold(0.0, f64::max), format!("first zero {}", zs[0])))
    });

    let exact = scene.exact_karp();
    s.run("karp_exact_vs_multipoles", 1e-12, || {
        let exact = exact.as_ref().map_err(|e| Error::Config(e.to_string()))?;
        let mut worst = 0.0f64;
        for i in 0..50 {
            let r = 1.0 + 49.0 * i as f64 / 49.0;
            let phi = 0.2 + 0.7 * i as f64;
            let direct = scene.psi1(Vec2::from_angle(phi) * r)?;
            if direct.norm() > 0.0 {
                worst = worst.max(rel(exact.eval(r, phi)?, direct));
            }
        }
        Ok((worst, format!("Karp order {}", exact.order())))
    });

    let depth = 10usize;
    s.run("karp_recursion", 1e-12, || {
        let exact = exact.as_ref().map_err(|e| Error::Config(e.to_string()))?;
        let len = depth.max(exact.order()) + 1;
        let grown = KarpExpansion::extend_recursion(kappa, exact.f()[0].clone(), exact.g()[0].clone(), len - 1)?;
        let (f, g) = padded(exact, len);
        let mut worst = 0.0f64;
        for n in 0..len {
            let scale = 1.0 + f[n].max_abs().max(g[n].max_abs());
            worst = worst.max((&grown.f()[n] - &f[n]).max_abs() / scale);
            worst = worst.max((&grown.g()[n] - &g[n]).max_abs() / scale);
        }
        Ok((worst, format!("orders 0..={}", len - 1)))
    });

    s.run("karp_symmetry", 1e-13, || {
        let exact = exact.as_ref().map_err(|e| Error::Config(e.to_string()))?;
        let grown = KarpExpansion::extend_recursion(kappa, exact.f()[0].clone(), exact.g()[0].clone(), depth)?;
        Ok((grown.check_symmetry().max_residual(), format!("orders 0..={depth}")))
    });

    s.run("farfield_roundtrip", 1e-10, || {
        let exact = exact.as_ref().map_err(|e| Error::Config(e.to_string()))?;
        let (f, g) = padded(exact, 9.max(exact.order() + 1));
        let exp = KarpExpansion::new(kappa, f, g, 0.0)?;
        let back = exp.to_farfield().to_karp()?;
        let mut worst = 0.0f64;
        for n in 0..=exp.order() {
            let scale = 1.0 + exp.f()[n].max_abs().max(exp.g()[n].max_abs());
            worst = worst.max((&back.f()[n] - &exp.f()[n]).max_abs() / scale);
            worst = worst.max((&back.g()[n] - &exp.g()[n]).max_abs() / scale);
        }
        Ok((worst, format!("orders 0..={}", exp.order())))
    });

    s.run("farfield_oracles", 1e-11, || {
        let exact = exact.as_ref().map_err(|e| Error::Config(e.to_string()))?;
        let (f, g) = padded(exact, 7);
        let via_karp = KarpExpansion::new(kappa, f, g, 0.0)?.to_farfield();
        let direct = scene.farfield_coeffs(6)?;
        let worst = via_karp
            .f
            .iter()
            .zip(&direct.f)
            .map(|(a, b)| (a - b).max_abs())
            .fold(0.0, f64::max);
        Ok((worst, "orders 0..=6".to_string()))
    });

    let grid: Vec<(f64, f64)> = (0..10).map(|i| (2.0 + 3.5 * i as f64, 0.6 * i as f64)).collect();
    s.run("helmholtz_rate", 0.2, || {
        let exact = exact.as_ref().map_err(|e| Error::Config(e.to_string()))?;
        let res = helmholtz_residual(exact, &grid, 0.05)?;
        if res.coarse == 0.0 {
            return Ok((0.0, "identically zero field".to_string()));
        }
        Ok((
            (res.rate - 2.0).abs(),
            format!("rate {:.3}, fine residual {:.2e}", res.rate, res.fine),
        ))
    });

    s.run("karp_fit_from_samples", 1e-8, || {
        let exact = exact.as_ref().map_err(|e| Error::Config(e.to_string()))?;
        let phi = 0.3;
        let radii: Vec<f64> = (0..24).map(|i| 2.0 * 1.12f64.powi(i) / kappa).collect();
        let values = radii
            .iter()
            .map(|&r| scene.psi1(Vec2::from_angle(phi) * r))
            .collect::<Result<Vec<_>>>()?;
        let fit = fit_from_samples(kappa, &radii, &values, exact.order())?;
        let point = exact.at_angle(phi);
        let scale = 1.0 + point.f.iter().chain(&point.g).map(|v| v.norm()).fold(0.0, f64::max);
        let worst = fit
            .a
            .iter()
            .zip(&point.f)
            .chain(fit.b.iter().zip(&point.g))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        Ok((worst / scale, format!("condition {:.2e}", fit.condition)))
    });

    let pair = ray_pair(scene, Vec2::default(), order, settings);
    let report = pair
        .as_ref()
        .map_err(|e| Error::Config(e.to_string()))
        .and_then(|(p, m)| recover_farfield(p, m, order, settings));
    s.run("recovered_farfield", 1e-3, || {
        let report = report.as_ref().map_err(|e| Error::Config(e.to_string()))?;
        let oracle = scene.farfield_coeffs(order)?;
        let phi = report.plus.frame_angle();
        let mut worst = 0.0f64;
        for n in 0..=order {
            worst = worst.max((report.f_plus[n] - oracle.f[n].eval(phi)).norm());
            worst = worst.max((report.f_minus[n] - oracle.f[n].eval(phi + PI)).norm());
        }
        Ok((worst, format!("orders 0..={order} on both rays")))
    });

    let radii: Vec<f64> = (0..10).map(|i| 10.0 * 10f64.powf(i as f64 / 9.0) / kappa).collect();
    s.run("reconstructed_field", 1e-3, || {
        let report = report.as_ref().map_err(|e| Error::Config(e.to_string()))?;
        let mut worst = 0.0f64;
        for sample in reconstruct_psi1(report, &radii)? {
            let truth = scene.psi1(sample.point)?;
            if truth.norm() > 0.0 {
                worst = worst.max(rel(sample.value, truth));
            } else {
                worst = worst.max(sample.value.norm());
            }
        }
        Ok((worst, "20 points, kappa r in [10, 100]".to_string()))
    });

    s.run("shift_covariance", 1e-10, || {
        let report = report.as_ref().map_err(|e| Error::Config(e.to_string()))?;
        let (p, m) = pair.as_ref().map_err(|e| Error::Config(e.to_string()))?;
        let q = Vec2::new(3.0, -2.0);
        let moved = |d: &RayIntensityData| -> Result<RayIntensityData> {
            let g = RayGeometry {
                base: q,
                ..d.meta.geometry
            };
            RayIntensityData::new(RayMeta::new(kappa, d.meta.k, g, q)?, d.rows.clone())
        };
        let shifted = recover_farfield(&moved(p)?, &moved(m)?, order, settings)?;
        let phase = Complex64::from_polar(1.0, scene.wave_vector().dot(q));
        let a = reconstruct_psi1(report, &radii)?;
        let b = reconstruct_psi1(&shifted, &radii)?;
        let worst = a
            .iter()
            .zip(&b)
            .map(|(u, v)| (v.value - phase * u.value).norm() / u.value.norm().max(1e-300))
            .fold(0.0, f64::max);
        Ok((worst, "q = (3, -2)".to_string()))
    });

    // Negative controls.
    match exact.as_ref() {
        Ok(exact) => {
            let mut bad = KarpExpansion::extend_recursion(kappa, exact.f()[0].clone(), exact.g()[0].clone(), 4)?;
            let v = bad.f()[2].mode(1) + Complex64::new(1e-6, 0.0);
            bad.f_mut()[2].set_mode(1, v)?;
            s.control(
                "control_corrupted_symmetry",
                bad.check_symmetry().max_residual(),
                1e-13,
                "F_2 given an odd mode; symmetry check must flag it",
            );
            let mut bad = exact.clone();
            let v = bad.g()[0].mode(0) + Complex64::new(0.1, 0.0);
            bad.g_mut()[0].set_mode(0, v)?;
            let res = helmholtz_residual(&bad, &grid, 0.05)?;
            s.control(
                "control_corrupted_helmholtz",
                (res.rate - 2.0).abs(),
                0.5,
                format!("G_0 given a constant mode; rate {:.3} must stall", res.rate),
            );
        }
        Err(e) => s.push(
            "control_corrupted_symmetry",
            f64::INFINITY,
            1e-13,
            format!("error: {e}"),
        ),
    }

    if order >= 1 {
        let outcome = pair
            .as_ref()
            .map_err(|e| Error::Config(e.to_string()))
            .and_then(|(p, m)| {
                let perturbed = RecoverySettings {
                    perturbation: Some(Perturbation {
                        order: 0,
                        delta: Complex64::new(1e-3, 0.0),
                    }),
                    ..settings.clone()
                };
                recover_farfield(p, m, order, &perturbed)
            });
        let (hit, detail) = match outcome {
            Err(Error::Precision { order: 1, detail }) => (1.0, detail),
            Err(e) => (0.0, format!("unexpected error: {e}")),
            Ok(_) => (0.0, "perturbed f_0 went unnoticed".to_string()),
        };
        s.control("control_amplification_detector", hit, 0.5, detail);
    }

    let k = scene.wave_vector();
    let along_k = RayGeometry::new(Vec2::default(), k, RaySign::Plus, FRAC_PI_2)?;
    let rejected = matches!(along_k.validate(kappa, k, settings.d_min), Err(Error::Geometry(_)));
    s.control(
        "control_excluded_direction",
        if rejected { 1.0 } else { 0.0 },
        0.5,
        "theta = k/|k| must be rejected",
    );

    let passed = s.checks.iter().filter(|c| c.passed).count();
    let failed = s.checks.len() - passed;
    Ok(VerifyReport {
        checks: s.checks,
        passed,
        failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_scene_passes_everything() {
        let scene = MultipoleScene::new(
            1.0,
            Vec2::new(0.0, 1.0),
            [
                (0, Complex64::new(1.0, 0.0)),
                (1, Complex64::new(0.5, 0.0)),
                (2, Complex64::new(0.25, 0.0)),
            ],
        )
        .unwrap();
        let report = run_suite(&scene, 2, &RecoverySettings::default()).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{c:?}");
        }
        assert!(report.checks.iter().any(|c| c.negative_control));
        assert!(report.checks.len() >= 15);
    }
}
