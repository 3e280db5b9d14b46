//! Intensity-only recovery of far-field coefficients on a pair of opposite
//! rays, reconstruction of the scattered field on the line, and propagation
//! into the half-plane beyond it.
//!
//! With `a(x) = sqrt|x| (|psi(x)|^2 - 1)` and `y = x + tau theta`, the
//! combination
//!
//! ```text
//! E(s) = -(i sqrt(pi kappa / 2) / D) (e^{i(k.y - kappa|y| + pi/4)} a(x) - e^{i(k.x - kappa|x| + pi/4)} a(y))
//! ```
//!
//! tends to `f_0` along the ray. Subtracting the part of `a` explained by
//! `f_0..f_n` and multiplying by `s^{n+1}` gives data of the same shape whose
//! limit is `f_{n+1}`. Limits are extrapolated by least squares in powers of
//! `s^{-1/2}` on radii where `e^{i alpha s}` is constant.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{RaySign, Vec2};
use crate::karp::{karp_from_farfield, KarpPoint};
use crate::lstsq::lstsq;
use crate::scenes::{RayIntensityData, RayMeta};
use crate::specfun::hankel01;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Highest order recovered without an explicit override.
pub const PRECISION_CAP: usize = 3;

/// Default bound on the growth coefficient of the estimator sequence.
pub const DEFAULT_GROWTH_THRESHOLD: f64 = 5e-3;

/// Fewest lattice points an order window is allowed to hold.
pub const MIN_LATTICE: usize = 6;

/// Sampling window for one recovery order, in units of `kappa s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderWindow {
    pub lo: f64,
    pub hi: f64,
    /// Target number of estimator radii.
    pub count: usize,
    /// Number of `s^{-p/2}` correction terms in the fit.
    pub terms: usize,
}

/// Deliberate corruption of one recovered coefficient, for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub order: usize,
    pub delta: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoverySettings {
    /// Window for order `n`; the last entry serves all higher orders.
    pub windows: Vec<OrderWindow>,
    pub d_min: f64,
    pub growth_threshold: f64,
    pub override_precision_cap: bool,
    pub perturbation: Option<Perturbation>,
}

impl Default for RecoverySettings {
    fn default() -> Self {
        let w = |lo, hi, count, terms| OrderWindow { lo, hi, count, terms };
        Self {
            windows: vec![
                w(100.0, 1e5, 16, 7),
                w(50.0, 300.0, 16, 6),
                w(5.0, 100.0, 16, 6),
                w(5.0, 60.0, 16, 4),
            ],
            d_min: crate::geometry::DEFAULT_D_MIN,
            growth_threshold: DEFAULT_GROWTH_THRESHOLD,
            override_precision_cap: false,
            perturbation: None,
        }
    }
}

impl RecoverySettings {
    pub fn window(&self, order: usize) -> OrderWindow {
        *self
            .windows
            .get(order)
            .or(self.windows.last())
            .expect("settings carry at least one window")
    }

    pub fn check_order(&self, order: usize) -> Result<()> {
        if self.windows.is_empty() {
            return Err(Error::Config("recovery settings need at least one window".to_string()));
        }
        if order > PRECISION_CAP && !self.override_precision_cap {
            return Err(Error::Precision {
                order,
                detail: format!(
                    "requested order exceeds the precision cap {PRECISION_CAP}; \
                     each order multiplies lower-order error by s^(n+1)"
                ),
            });
        }
        Ok(())
    }

    /// Frame radii for order `n`: points of `m * 2 pi / |alpha|` inside the
    /// window, spread geometrically in `m`.
    pub fn lattice(&self, meta: &RayMeta, order: usize) -> Vec<f64> {
        let w = self.window(order);
        let period = 2.0 * PI / meta.alpha().abs();
        let lo = (w.lo / meta.kappa / period).ceil().max(1.0);
        // Near-forward rays have long periods; stretch the window rather
        // than fit through a handful of points.
        let hi = (w.hi / meta.kappa / period).floor().max(lo + (MIN_LATTICE - 1) as f64);
        if w.count == 0 {
            return Vec::new();
        }
        let mut ms: Vec<f64> = (0..w.count)
            .map(|i| {
                let frac = if w.count == 1 {
                    0.0
                } else {
                    i as f64 / (w.count - 1) as f64
                };
                (lo * (hi / lo).powf(frac)).round()
            })
            .collect();
        ms.dedup();
        ms.into_iter().map(|m| m * period).collect()
    }

    /// Ray parameters to sample so that orders `0..=order` find their
    /// lattice points (partners at `s + tau` are added by the sampler).
    pub fn sampling_radii(&self, meta: &RayMeta, order: usize) -> Vec<f64> {
        let d = meta.frame_offset();
        let mut out: Vec<f64> = (0..=order)
            .flat_map(|n| self.lattice(meta, n))
            .map(|t| t - d)
            .filter(|&s| s > 0.0)
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        out
    }
}

/// `(s, sqrt(t) (I - 1))` with `t` the distance from the frame origin.
pub fn a_values(data: &RayIntensityData) -> Vec<(f64, f64)> {
    data.rows
        .iter()
        .map(|&(s, v)| (s, data.meta.frame_radius(s).sqrt() * (v - 1.0)))
        .collect()
}

/// Sequence `E(t)` on frame radii `ts`, with `b` giving the real data at a
/// frame radius.
pub fn estimator_values(meta: &RayMeta, ts: &[f64], b: impl Fn(f64) -> Result<f64> + Sync) -> Result<Vec<Complex64>> {
    let d = meta.d_value();
    if d == 0.0 {
        return Err(Error::Geometry("estimator denominator D vanishes".to_string()));
    }
    let alpha = meta.alpha();
    let tau = meta.geometry.tau;
    let w = Complex64::from_polar(1.0, alpha * tau);
    let scale = -I * (PI * meta.kappa / 2.0).sqrt() / d;
    ts.par_iter()
        .map(|&t| {
            let u = Complex64::from_polar(1.0, alpha * t + FRAC_PI_4);
            Ok(scale * u * (w * b(t)? - b(t + tau)?))
        })
        .collect()
}

/// Outcome of extrapolating one estimator sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub limit: Complex64,
    pub samples: usize,
    pub terms: usize,
    /// Whether `e^{i alpha t}` was constant over the radii.
    pub aligned: bool,
    pub fit_residual: f64,
    pub condition: f64,
    /// Log-log slope of `|E(t) - limit|` against `t`.
    pub convergence_exponent: Option<f64>,
    /// Coefficient of `t / t_max` in an augmented fit; large values mean the
    /// sequence grows instead of settling.
    pub growth: f64,
    /// Coefficient of `t^{-1/2}` in the fit.
    pub leading_correction: Complex64,
}

fn is_aligned(alpha: f64, ts: &[f64]) -> bool {
    let Some(&t0) = ts.first() else { return true };
    ts.iter().all(|&t| {
        let d = (alpha * (t - t0)).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d) < 1e-6
    })
}

fn solve(
    ts: &[f64],
    values: &[Complex64],
    cols: &[Box<dyn Fn(f64) -> Complex64 + '_>],
) -> Result<crate::lstsq::LstsqSolution> {
    let design: Vec<Complex64> = ts.iter().flat_map(|&t| cols.iter().map(move |c| c(t))).collect();
    lstsq(ts.len(), cols.len(), &design, values)
}

/// Least-squares limit of `values` at `t -> infinity`.
///
/// On aligned radii the model is `f + sum_{p<=P} c_p t^{-p/2}`; otherwise
/// oscillating columns `e^{i alpha t} t^{-p/2}` and `e^{2 i alpha t} t^{-p/2}`
/// are added.
pub fn extrapolate(alpha: f64, ts: &[f64], values: &[Complex64], terms: usize) -> Result<Extrapolation> {
    if ts.len() != values.len() || ts.len() < 2 {
        return Err(Error::Config(format!(
            "extrapolation needs at least 2 samples, got {}",
            ts.len()
        )));
    }
    let aligned = is_aligned(alpha, ts);
    let one = |_: f64| Complex64::new(1.0, 0.0);
    let power = |p: usize| move |t: f64| Complex64::new(t.powf(-(p as f64) / 2.0), 0.0);
    let mut cols: Vec<Box<dyn Fn(f64) -> Complex64>> = vec![Box::new(one)];
    let terms = if aligned {
        let p = terms.min(ts.len() - 2);
        cols.extend((1..=p).map(|p| Box::new(power(p)) as Box<dyn Fn(f64) -> Complex64>));
        p
    } else {
        let p = terms.min((ts.len().saturating_sub(2)) / 3);
        if p == 0 {
            return Err(Error::Config(format!(
                "radii are not phase-aligned and {} samples are too few for the oscillatory model",
                ts.len()
            )));
        }
        cols.extend((1..=p).map(|p| Box::new(power(p)) as Box<dyn Fn(f64) -> Complex64>));
        for harmonic in [1.0, 2.0] {
            cols.extend((1..=p).map(move |p| {
                Box::new(move |t: f64| Complex64::from_polar(t.powf(-(p as f64) / 2.0), harmonic * alpha * t))
                    as Box<dyn Fn(f64) -> Complex64>
            }));
        }
        p
    };
    let sol = solve(ts, values, &cols)?;
    let limit = sol.coefficients[0];
    let leading_correction = sol.coefficients.get(1).copied().unwrap_or_default();

    let t_max = ts.iter().copied().fold(0.0, f64::max);
    let growth = if ts.len() >= 3 {
        let pg = terms.min(ts.len() - 3);
        let mut gcols: Vec<Box<dyn Fn(f64) -> Complex64>> = vec![Box::new(one)];
        gcols.extend((1..=pg).map(|p| Box::new(power(p)) as Box<dyn Fn(f64) -> Complex64>));
        gcols.push(Box::new(move |t: f64| Complex64::new(t / t_max, 0.0)));
        let g = solve(ts, values, &gcols)?;
        g.coefficients.last().map_or(0.0, |c| c.norm())
    } else {
        0.0
    };

    let pts: Vec<(f64, f64)> = ts
        .iter()
        .zip(values)
        .filter_map(|(&t, v)| {
            let e = (v - limit).norm();
            (e > 0.0).then(|| (t.ln(), e.ln()))
        })
        .collect();
    let convergence_exponent = loglog_slope(&pts);

    Ok(Extrapolation {
        limit,
        samples: ts.len(),
        terms,
        aligned,
        fit_residual: sol.max_residual,
        condition: sol.condition,
        convergence_exponent,
        growth,
        leading_correction,
    })
}

/// Least-squares slope through `(x, y)` points.
pub fn loglog_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Part of `a` explained by far-field coefficients `f_0..f_{n-1}` at frame
/// radius `t`.
fn model_a(meta: &RayMeta, coeffs: &[Complex64], t: f64) -> f64 {
    let kappa = meta.kappa;
    let mut series = Complex64::new(0.0, 0.0);
    for f in coeffs.iter().rev() {
        series = series / t + f;
    }
    let psi = Complex64::from_polar((2.0 / (PI * kappa * t)).sqrt(), kappa * t - FRAC_PI_4) * series;
    let incident = Complex64::from_polar(1.0, (kappa + meta.alpha()) * t);
    t.sqrt() * ((incident + psi).norm_sqr() - 1.0)
}

/// Estimate of one far-field order on one ray.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    pub order: usize,
    pub ray: RaySign,
    pub value: Complex64,
    pub extrapolation: Extrapolation,
    /// Frame radii used.
    pub radii: Vec<f64>,
    /// Estimator sequence on those radii.
    pub sequence: Vec<Complex64>,
}

fn window_radii(data: &RayIntensityData, settings: &RecoverySettings, order: usize) -> Vec<f64> {
    let meta = &data.meta;
    let w = settings.window(order);
    let (lo, hi) = (w.lo / meta.kappa, w.hi / meta.kappa);
    let available: Vec<f64> = data
        .paired_radii()
        .into_iter()
        .map(|s| meta.frame_radius(s))
        .filter(|&t| t >= lo * (1.0 - 1e-9) && t <= hi * (1.0 + 1e-9))
        .collect();
    let targets = settings.lattice(meta, order);
    if targets.is_empty() || available.len() <= w.count {
        return available;
    }
    let mut picked: Vec<f64> = targets
        .iter()
        .map(|&target| {
            *available
                .iter()
                .min_by(|a, b| (*a - target).abs().total_cmp(&(*b - target).abs()))
                .expect("non-empty")
        })
        .collect();
    picked.dedup();
    picked
}

/// Estimate of `f_n` on the ray of `data` given `f_0..f_{n-1}` on that ray.
pub fn next_order_step(
    data: &RayIntensityData,
    previous: &[Complex64],
    settings: &RecoverySettings,
) -> Result<OrderEstimate> {
    let meta = data.meta;
    let d = meta.d_value();
    if d.abs() < settings.d_min {
        return Err(Error::Geometry(format!(
            "|D| = {:.3e} is below the admissible minimum {}",
            d.abs(),
            settings.d_min
        )));
    }
    let order = previous.len();
    let ts = window_radii(data, settings, order);
    let w = settings.window(order);
    if ts.len() < 2 {
        return Err(Error::Config(format!(
            "order {order}: only {} paired samples in the window kappa*s in [{}, {}]",
            ts.len(),
            w.lo,
            w.hi
        )));
    }
    let offset = meta.frame_offset();
    let b = |t: f64| -> Result<f64> {
        let s = t - offset;
        let v = data
            .lookup(s)
            .ok_or_else(|| Error::Config(format!("no intensity sample at s = {s}")))?;
        let a = t.sqrt() * (v - 1.0);
        Ok(if order == 0 {
            a
        } else {
            t.powi(order as i32) * (a - model_a(&meta, previous, t))
        })
    };
    let sequence = estimator_values(&meta, &ts, b)?;
    let extrapolation = extrapolate(meta.alpha(), &ts, &sequence, w.terms)?;
    if extrapolation.growth > settings.growth_threshold {
        return Err(Error::Precision {
            order,
            detail: format!(
                "estimator sequence on the {} ray grows like s (coefficient {:.3e} > {:.1e}); \
                 lower orders are inaccurate",
                meta.geometry.sign.label(),
                extrapolation.growth,
                settings.growth_threshold
            ),
        });
    }
    Ok(OrderEstimate {
        order,
        ray: meta.geometry.sign,
        value: extrapolation.limit,
        extrapolation,
        radii: ts,
        sequence,
    })
}

/// Estimate of `f_0` on the ray of `data`.
pub fn estimate_f0(data: &RayIntensityData, settings: &RecoverySettings) -> Result<OrderEstimate> {
    next_order_step(data, &[], settings)
}

/// Orders `0..=order` on one ray.
pub fn recover_ray(data: &RayIntensityData, order: usize, settings: &RecoverySettings) -> Result<Vec<OrderEstimate>> {
    settings.check_order(order)?;
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut out = Vec::with_capacity(order + 1);
    for n in 0..=order {
        let mut est = next_order_step(data, &coeffs, settings)?;
        if let Some(p) = settings.perturbation.filter(|p| p.order == n) {
            est.value += p.delta;
        }
        coeffs.push(est.value);
        out.push(est);
    }
    Ok(out)
}

/// Everything recovered from one ray pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub plus: RayMeta,
    pub minus: RayMeta,
    /// `f_n(phi)` from the `+` ray.
    pub f_plus: Vec<Complex64>,
    /// `f_n(phi + pi)` from the `-` ray.
    pub f_minus: Vec<Complex64>,
    /// `F_n(phi)`, `G_n(phi)`.
    pub karp: KarpPoint,
    /// Residual of each order's 2x2 system.
    pub system_residual: Vec<f64>,
    pub estimates: Vec<OrderEstimate>,
    pub warnings: Vec<String>,
}

impl RecoveryReport {
    pub fn order(&self) -> usize {
        self.f_plus.len() - 1
    }

    pub fn frame_origin(&self) -> Vec2 {
        self.plus.frame_origin
    }

    fn shift_factor(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.plus.k.dot(self.plus.frame_origin))
    }

    /// Reconstructed `psi1` at ray parameter `s` on one of the two rays.
    pub fn psi1_on_ray(&self, ray: RaySign, s: f64) -> Result<Complex64> {
        let (meta, point) = match ray {
            RaySign::Plus => (&self.plus, self.karp.clone()),
            RaySign::Minus => (&self.minus, self.karp.antipode()),
        };
        Ok(self.shift_factor() * point.eval(meta.frame_radius(s))?)
    }

    /// Reconstructed `psi1` at a point of the line other than the frame
    /// origin.
    pub fn psi1_on_line(&self, y: Vec2) -> Result<Complex64> {
        let q = self.frame_origin();
        let theta = self.plus.geometry.theta;
        let rel = y - q;
        if rel.cross(theta).abs() > 1e-9 * (1.0 + rel.norm()) {
            return Err(Error::Domain(format!("{y} is not on the measurement line")));
        }
        let t = rel.dot(theta);
        let point = if t > 0.0 {
            self.karp.clone()
        } else {
            self.karp.antipode()
        };
        Ok(self.shift_factor() * point.eval(t.abs())?)
    }
}

fn check_pair(plus: &RayIntensityData, minus: &RayIntensityData, settings: &RecoverySettings) -> Result<()> {
    let (p, m) = (&plus.meta, &minus.meta);
    if p.geometry.sign != RaySign::Plus || m.geometry.sign != RaySign::Minus {
        return Err(Error::Config(format!(
            "expected a plus ray and a minus ray, got {} and {}",
            p.geometry.sign.label(),
            m.geometry.sign.label()
        )));
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    let same_vec = |a: Vec2, b: Vec2| close(a.x, b.x) && close(a.y, b.y);
    if !close(p.kappa, m.kappa)
        || !same_vec(p.k, m.k)
        || !same_vec(p.geometry.theta, m.geometry.theta)
        || !close(p.geometry.tau, m.geometry.tau)
        || !same_vec(p.frame_origin, m.frame_origin)
    {
        return Err(Error::Config(
            "the two rays must share kappa, k, direction, tau and frame origin".to_string(),
        ));
    }
    p.geometry.validate(p.kappa, p.k, settings.d_min)?;
    m.geometry.validate(m.kappa, m.k, settings.d_min)?;
    Ok(())
}

/// Far-field orders `0..=order` on both rays and the Karp coefficients they
/// determine.
pub fn recover_farfield(
    plus: &RayIntensityData,
    minus: &RayIntensityData,
    order: usize,
    settings: &RecoverySettings,
) -> Result<RecoveryReport> {
    settings.check_order(order)?;
    check_pair(plus, minus, settings)?;
    let (ep, em) = rayon::join(
        || recover_ray(plus, order, settings),
        || recover_ray(minus, order, settings),
    );
    let (ep, em) = (ep?, em?);
    let f_plus: Vec<Complex64> = ep.iter().map(|e| e.value).collect();
    let f_minus: Vec<Complex64> = em.iter().map(|e| e.value).collect();
    let karp = karp_from_farfield(plus.meta.kappa, &f_plus, &f_minus)?;
    let system_residual = karp.system_residual(&f_plus, &f_minus);
    let mut warnings = Vec::new();
    if order == 0 {
        let lead = ep[0]
            .extrapolation
            .leading_correction
            .norm()
            .max(em[0].extrapolation.leading_correction.norm());
        if lead > 1e-8 {
            warnings.push(format!(
                "only f_0 recovered while the estimator carries corrections of size {lead:.2e}; \
                 the reconstruction is accurate to O(1/r) only"
            ));
        }
    }
    for e in ep.iter().chain(&em) {
        if e.extrapolation.fit_residual > 1e-6 * (1.0 + e.value.norm()) {
            warnings.push(format!(
                "order {} on the {} ray: extrapolation residual {:.2e}",
                e.order,
                e.ray.label(),
                e.extrapolation.fit_residual
            ));
        }
        if !e.extrapolation.aligned {
            warnings.push(format!(
                "order {} on the {} ray: radii are not phase-aligned, oscillatory model used",
                e.order,
                e.ray.label()
            ));
        }
    }
    Ok(RecoveryReport {
        plus: plus.meta,
        minus: minus.meta,
        f_plus,
        f_minus,
        karp,
        system_residual,
        estimates: ep.into_iter().chain(em).collect(),
        warnings,
    })
}

/// One reconstructed sample of `psi1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub ray: RaySign,
    pub s: f64,
    pub point: Vec2,
    pub value: Complex64,
}

/// `psi1` at ray parameters `radii` on both rays.
pub fn reconstruct_psi1(report: &RecoveryReport, radii: &[f64]) -> Result<Vec<FieldSample>> {
    let mut out = Vec::with_capacity(2 * radii.len());
    for (ray, meta) in [(RaySign::Plus, &report.plus), (RaySign::Minus, &report.minus)] {
        for &s in radii {
            out.push(FieldSample {
                ray,
                s,
                point: meta.geometry.point(s),
                value: report.psi1_on_ray(ray, s)?,
            });
        }
    }
    Ok(out)
}

/// Straight line `point + t direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub point: Vec2,
    pub direction: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlaneValue {
    pub value: Complex64,
    /// `|value(R) - value(R/2)|`.
    pub truncation_estimate: f64,
    pub radius: f64,
}

fn halfplane_integral(
    kappa: f64,
    field: &(dyn Fn(Vec2) -> Result<Complex64> + Sync),
    axis: Line,
    x: Vec2,
    h: f64,
    (t_lo, t_hi): (f64, f64),
) -> Result<Complex64> {
    let (foot, dir) = (axis.point, axis.direction);
    // Finer steps within a few distances of the foot, where the kernel peaks.
    let coarse = (0.05 / kappa).min(h / 4.0);
    let fine = (h / 50.0).min(coarse);
    let near = 4.0 * h;
    let mut knots = vec![t_lo];
    for edge in [-near, near, t_hi] {
        if edge > *knots.last().unwrap() && edge <= t_hi {
            knots.push(edge);
        }
    }
    if *knots.last().unwrap() < t_hi {
        knots.push(t_hi);
    }
    let integrand = |t: f64| -> Result<Complex64> {
        let y = foot + dir * t;
        let rho = (x - y).norm();
        let (_, h1) = hankel01(Complex64::new(kappa * rho, 0.0))?;
        Ok(I * kappa / 2.0 * h1 * (h / rho) * field(y)?)
    };
    let pieces: Vec<(f64, f64, f64)> = knots
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let step = if w[0] >= -near && w[1] <= near { fine } else { coarse };
            (w[0], w[1], step)
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for (a, b, step) in pieces {
        let n = ((b - a) / step).ceil().max(1.0) as usize;
        let dt = (b - a) / n as f64;
        let sum = (0..=n)
            .into_par_iter()
            .map(|i| {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                Ok::<_, Error>(integrand(a + i as f64 * dt)? * w)
            })
            .try_reduce(|| Complex64::new(0.0, 0.0), |p, q| Ok(p + q))?;
        total += sum * dt;
    }
    Ok(total)
}

/// `psi1(x) = 2 int_L dG/dnu_y(x - y) psi1(y) dy` over `|y| <= radius`, with
/// `G = (i/4) H0(kappa |x - y|)` and `nu` the unit normal of `L` pointing
/// towards `x`.
pub fn propagate_halfplane(
    kappa: f64,
    field: &(dyn Fn(Vec2) -> Result<Complex64> + Sync),
    line: Line,
    x: Vec2,
    radius: f64,
) -> Result<HalfPlaneValue> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::Config(format!("wavenumber must be positive, got {kappa}")));
    }
    let len = line.direction.norm();
    if !(len > 0.0) || !line.point.is_finite() || !x.is_finite() {
        return Err(Error::Domain(
            "line needs a finite point and a non-zero direction".to_string(),
        ));
    }
    let dir = line.direction * (1.0 / len);
    let foot = line.point + dir * (x - line.point).dot(dir);
    let axis = Line {
        point: foot,
        direction: dir,
    };
    let h = (x - foot).norm();
    if h <= 1e-12 * (1.0 + x.norm()) {
        return Err(Error::Domain(format!("{x} lies on the line")));
    }
    let span = |r: f64| -> Result<(f64, f64)> {
        let c = foot.dot(dir);
        let disc = c * c - (foot.dot(foot) - r * r);
        if !(disc > 0.0) {
            return Err(Error::Domain(format!("truncation radius {r} does not reach the line")));
        }
        Ok((-c - disc.sqrt(), -c + disc.sqrt()))
    };
    let (a1, b1) = span(radius)?;
    let (a0, b0) = span(radius / 2.0).unwrap_or((0.0, 0.0));
    let full = halfplane_integral(kappa, field, axis, x, h, (a1, b1))?;
    let half = if b0 > a0 {
        halfplane_integral(kappa, field, axis, x, h, (a0, b0))?
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok(HalfPlaneValue {
        value: full,
        truncation_estimate: (full - half).norm(),
        radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RayGeometry;
    use crate::scenes::{sample_ray, MultipoleScene};
    use std::f64::consts::FRAC_PI_2;

    fn pair(scene: &MultipoleScene, order: usize) -> (RayIntensityData, RayIntensityData) {
        let settings = RecoverySettings::default();
        let k = Vec2::new(0.0, 1.0);
        let mk = |sign| {
            let g = RayGeometry::new(Vec2::default(), Vec2::new(1.0, 0.0), sign, FRAC_PI_2).unwrap();
            RayMeta::new(1.0, k, g, Vec2::default()).unwrap()
        };
        let (mp, mm) = (mk(RaySign::Plus), mk(RaySign::Minus));
        (
            sample_ray(scene, mp, &settings.sampling_radii(&mp, order)).unwrap(),
            sample_ray(scene, mm, &settings.sampling_radii(&mm, order)).unwrap(),
        )
    }

    #[test]
    fn monopole_leading_orders() {
        let scene = MultipoleScene::new(1.0, Vec2::new(0.0, 1.0), [(0, Complex64::new(1.0, 0.0))]).unwrap();
        let (p, m) = pair(&scene, 1);
        let report = recover_farfield(&p, &m, 1, &RecoverySettings::default()).unwrap();
        assert!((report.f_plus[0] - 1.0).norm() < 1e-6, "{:?}", report.f_plus);
        assert!((report.f_plus[1] - Complex64::new(0.0, -0.125)).norm() < 1e-4);
        assert!(report.system_residual.iter().all(|&r| r < 1e-12));
    }

    #[test]
    fn zero_scene_recovers_nothing() {
        let scene = MultipoleScene::empty(1.0, Vec2::new(0.0, 1.0)).unwrap();
        let (p, m) = pair(&scene, 2);
        let report = recover_farfield(&p, &m, 2, &RecoverySettings::default()).unwrap();
        assert!(report.f_plus.iter().chain(&report.f_minus).all(|f| f.norm() < 1e-12));
    }

    #[test]
    fn swapped_rays_are_rejected() {
        let scene = MultipoleScene::empty(1.0, Vec2::new(0.0, 1.0)).unwrap();
        let (p, m) = pair(&scene, 0);
        assert!(matches!(
            recover_farfield(&m, &p, 0, &RecoverySettings::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn order_above_cap_needs_override() {
        let settings = RecoverySettings::default();
        assert!(matches!(
            settings.check_order(4),
            Err(Error::Precision { order: 4, .. })
        ));
        let settings = RecoverySettings {
            override_precision_cap: true,
            ..settings
        };
        assert!(settings.check_order(4).is_ok());
    }

    #[test]
    fn halfplane_on_line_is_rejected() {
        let f = |_: Vec2| Ok(Complex64::new(1.0, 0.0));
        let line = Line {
            point: Vec2::new(5.0, 0.0),
            direction: Vec2::new(0.0, 1.0),
        };
        assert!(propagate_halfplane(1.0, &f, line, Vec2::new(5.0, 3.0), 50.0).is_err());
    }
}
