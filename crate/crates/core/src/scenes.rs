//! Synthetic ground truth: origin-centred multipole radiation solutions
//! under plane-wave illumination, and intensity sampling along rays.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::{AngularFunction, DEFAULT_TRUNCATION};
use crate::error::{Error, Result};
use crate::geometry::{RayGeometry, Vec2};
use crate::karp::{FarFieldSeries, KarpExpansion, MAX_ORDER};
use crate::specfun::{asym_coeff_general, hankel_seq, MAX_ORDER as MAX_HANKEL_ORDER};

/// Largest far-field order [`MultipoleScene::farfield_coeffs`] produces.
pub const MAX_FARFIELD_ORDER: usize = 16;

/// Relative tolerance on `|k| = kappa` when loading a scene.
pub const WAVE_VECTOR_TOL: f64 = 1e-12;

/// Plane wave `e^{i k.x}` plus a radiation solution `psi1`.
pub trait Scene: Sync {
    fn kappa(&self) -> f64;

    fn wave_vector(&self) -> Vec2;

    fn psi1(&self, x: Vec2) -> Result<Complex64>;

    fn incident(&self, x: Vec2) -> Complex64 {
        Complex64::from_polar(1.0, self.wave_vector().dot(x))
    }

    /// `|e^{i k.x} + psi1(x)|^2`.
    fn intensity(&self, x: Vec2) -> Result<f64> {
        Ok((self.incident(x) + self.psi1(x)?).norm_sqr())
    }
}

impl<S: Scene + ?Sized> Scene for &S {
    fn kappa(&self) -> f64 {
        (**self).kappa()
    }
    fn wave_vector(&self) -> Vec2 {
        (**self).wave_vector()
    }
    fn psi1(&self, x: Vec2) -> Result<Complex64> {
        (**self).psi1(x)
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("wavenumber must be positive, got {kappa}")))
    }
}

/// Checks `|k| = kappa` to [`WAVE_VECTOR_TOL`] and returns `k` rescaled to
/// exactly that length.
pub fn checked_wave_vector(kappa: f64, k: Vec2) -> Result<Vec2> {
    check_kappa(kappa)?;
    let len = k.norm();
    if !k.is_finite() || !((len - kappa).abs() <= WAVE_VECTOR_TOL * kappa) {
        return Err(Error::Config(format!(
            "incident wave vector {k} has length {len}, expected kappa = {kappa}"
        )));
    }
    if (len - kappa).abs() <= 1e-15 * kappa {
        Ok(k)
    } else {
        Ok(k * (kappa / len))
    }
}

/// `psi1 = sum_m c_m H_|m|(kappa |x|) e^{i m phi}` for a sparse set of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipoleScene {
    kappa: f64,
    k: Vec2,
    modes: BTreeMap<i64, Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeEntry {
    m: i64,
    re: f64,
    im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    kappa: f64,
    k: [f64; 2],
    modes: Vec<ModeEntry>,
}

impl MultipoleScene {
    pub fn new(kappa: f64, k: Vec2, modes: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        let k = checked_wave_vector(kappa, k)?;
        let mut map = BTreeMap::new();
        for (m, c) in modes {
            if m.unsigned_abs() > MAX_HANKEL_ORDER as u64 {
                return Err(Error::Config(format!(
                    "mode {m} exceeds the supported order {MAX_HANKEL_ORDER}"
                )));
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::Config(format!("mode {m} has a non-finite amplitude")));
            }
            if map.insert(m, c).is_some() {
                return Err(Error::Config(format!("mode {m} listed twice")));
            }
        }
        Ok(Self { kappa, k, modes: map })
    }

    /// Scene with no scattered field.
    pub fn empty(kappa: f64, k: Vec2) -> Result<Self> {
        Self::new(kappa, k, [])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SceneFile = serde_json::from_str(text)?;
        Self::new(
            file.kappa,
            file.k.into(),
            file.modes.into_iter().map(|e| (e.m, Complex64::new(e.re, e.im))),
        )
    }

    pub fn to_json(&self) -> String {
        let file = SceneFile {
            kappa: self.kappa,
            k: self.k.into(),
            modes: self
                .modes
                .iter()
                .map(|(&m, c)| ModeEntry { m, re: c.re, im: c.im })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("scene serializes")
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.modes.iter().map(|(&m, &c)| (m, c))
    }

    pub fn max_order(&self) -> u32 {
        self.modes.keys().map(|m| m.unsigned_abs() as u32).max().unwrap_or(0)
    }

    /// Multiplies every amplitude by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            modes: self.modes.iter().map(|(&m, &c)| (m, c * factor)).collect(),
            ..self.clone()
        }
    }

    fn angular_truncation(&self) -> usize {
        DEFAULT_TRUNCATION.max(self.max_order() as usize)
    }

    /// Exact finite Karp expansion from `H_n = P_n(1/r) H0 + Q_n(1/r) H1`,
    /// with `P`, `Q` generated by `H_{n+1} = (2n/(kappa r)) H_n - H_{n-1}`.
    pub fn exact_karp(&self) -> Result<KarpExpansion> {
        let top = self.max_order() as usize;
        let order = top.saturating_sub(1);
        if order > MAX_ORDER {
            return Err(Error::Config(format!(
                "mode order {top} needs Karp order {order}, above {MAX_ORDER}"
            )));
        }
        let (p, q) = hankel_polynomials(self.kappa, top);
        let truncation = self.angular_truncation();
        let mut f = vec![AngularFunction::zero(truncation); order + 1];
        let mut g = vec![AngularFunction::zero(truncation); order + 1];
        for (m, c) in self.modes() {
            let n = m.unsigned_abs() as usize;
            for (j, coeff) in p[n].iter().enumerate() {
                let v = f[j].mode(m) + c * *coeff;
                f[j].set_mode(m, v)?;
            }
            for (j, coeff) in q[n].iter().enumerate() {
                let v = g[j].mode(m) + c * *coeff;
                g[j].set_mode(m, v)?;
            }
        }
        KarpExpansion::new(self.kappa, f, g, 0.0)
    }

    /// `f_j = sum_m c_m e^{-i|m| pi/2} C_{|m|,j} kappa^{-j} e^{i m phi}`,
    /// `j = 0..=order`.
    pub fn farfield_coeffs(&self, order: usize) -> Result<FarFieldSeries> {
        if order > MAX_FARFIELD_ORDER {
            return Err(Error::Config(format!(
                "far-field order {order} exceeds {MAX_FARFIELD_ORDER}"
            )));
        }
        let truncation = self.angular_truncation();
        let mut f = vec![AngularFunction::zero(truncation); order + 1];
        for (m, c) in self.modes() {
            let n = m.unsigned_abs() as u32;
            let phase = Complex64::from_polar(1.0, -(n as f64) * FRAC_PI_2);
            for (j, fj) in f.iter_mut().enumerate() {
                let coeff = asym_coeff_general(n, j as u32) * self.kappa.powi(-(j as i32));
                let v = fj.mode(m) + c * phase * coeff;
                fj.set_mode(m, v)?;
            }
        }
        FarFieldSeries::new(self.kappa, f)
    }
}

/// Coefficients in `u = 1/r` of `P_n`, `Q_n` for `n = 0..=top`.
fn hankel_polynomials(kappa: f64, top: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut p = vec![vec![1.0], vec![0.0]];
    let mut q = vec![vec![0.0], vec![1.0]];
    for n in 1..top {
        let step = |prev: &[f64], prev2: &[f64]| {
            let mut next = vec![0.0; prev.len() + 1];
            for (j, v) in prev.iter().enumerate() {
                next[j + 1] += 2.0 * n as f64 / kappa * v;
            }
            for (j, v) in prev2.iter().enumerate() {
                next[j] -= v;
            }
            next
        };
        let pn = step(&p[n], &p[n - 1]);
        let qn = step(&q[n], &q[n - 1]);
        p.push(pn);
        q.push(qn);
    }
    p.truncate(top + 1);
    q.truncate(top + 1);
    (p, q)
}

impl Scene for MultipoleScene {
    fn kappa(&self) -> f64 {
        self.kappa
    }

    fn wave_vector(&self) -> Vec2 {
        self.k
    }

    fn psi1(&self, x: Vec2) -> Result<Complex64> {
        let r = x.norm();
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("scattered field is singular at {x}")));
        }
        if self.modes.is_empty() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let h = hankel_seq(self.max_order(), self.kappa * r)?;
        let phi = x.angle();
        Ok(self
            .modes()
            .map(|(m, c)| c * h[m.unsigned_abs() as usize] * Complex64::from_polar(1.0, m as f64 * phi))
            .sum())
    }
}

/// `inner` moved by `offset`: `psi1(x) = e^{i k.offset} inner.psi1(x - offset)`.
///
/// The intensity of the translated scene at `x + offset` equals the
/// intensity of `inner` at `x`.
#[derive(Debug, Clone)]
pub struct Translated<S> {
    inner: S,
    offset: Vec2,
    factor: Complex64,
}

impl<S: Scene> Translated<S> {
    pub fn new(inner: S, offset: Vec2) -> Self {
        let factor = Complex64::from_polar(1.0, inner.wave_vector().dot(offset));
        Self { inner, offset, factor }
    }

    pub fn offset(&self) -> Vec2 {
        self.offset
    }
}

impl<S: Scene> Scene for Translated<S> {
    fn kappa(&self) -> f64 {
        self.inner.kappa()
    }

    fn wave_vector(&self) -> Vec2 {
        self.inner.wave_vector()
    }

    fn psi1(&self, x: Vec2) -> Result<Complex64> {
        Ok(self.factor * self.inner.psi1(x - self.offset)?)
    }
}

/// Everything needed to interpret intensity rows sampled along one ray.
///
/// `frame_origin` is the point `q` the recovery treats as origin; the ray
/// must run away from it, i.e. `base = q + d * direction` with `d >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayMeta {
    pub kappa: f64,
    pub k: Vec2,
    pub geometry: RayGeometry,
    pub frame_origin: Vec2,
}

impl RayMeta {
    pub fn new(kappa: f64, k: Vec2, geometry: RayGeometry, frame_origin: Vec2) -> Result<Self> {
        let k = checked_wave_vector(kappa, k)?;
        let meta = Self {
            kappa,
            k,
            geometry,
            frame_origin,
        };
        let rel = geometry.base - frame_origin;
        let scale = 1.0 + rel.norm();
        if rel.cross(geometry.theta).abs() > 1e-9 * scale || !frame_origin.is_finite() {
            return Err(Error::Geometry(format!(
                "ray base {} is not on the line through the frame origin {frame_origin} along {}",
                geometry.base, geometry.theta
            )));
        }
        if rel.dot(geometry.direction()) < -1e-9 * scale {
            return Err(Error::Geometry(format!(
                "ray from {} points back through the frame origin {frame_origin}",
                geometry.base
            )));
        }
        Ok(meta)
    }

    /// Distance `d` from the frame origin to the ray base.
    pub fn frame_offset(&self) -> f64 {
        (self.geometry.base - self.frame_origin)
            .dot(self.geometry.direction())
            .max(0.0)
    }

    /// Distance from the frame origin of the ray point at parameter `s`.
    pub fn frame_radius(&self, s: f64) -> f64 {
        s + self.frame_offset()
    }

    /// Polar angle of the ray direction in the frame.
    pub fn frame_angle(&self) -> f64 {
        self.geometry.direction().angle()
    }

    /// `k . direction - kappa`.
    pub fn alpha(&self) -> f64 {
        self.geometry.alpha(self.kappa, self.k)
    }

    pub fn d_value(&self) -> f64 {
        self.geometry.d_value(self.kappa, self.k)
    }
}

/// Intensity rows `(s, |psi|^2)` along `base + s * direction`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayIntensityData {
    pub meta: RayMeta,
    pub rows: Vec<(f64, f64)>,
}

impl RayIntensityData {
    pub fn new(meta: RayMeta, rows: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(s, v)) in rows.iter().enumerate() {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::Config(format!(
                    "row {i}: ray parameter must be positive, got {s}"
                )));
            }
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Config(format!(
                    "row {i}: intensity must be finite and >= 0, got {v}"
                )));
            }
            if i > 0 && !(s > rows[i - 1].0) {
                return Err(Error::Config(format!("row {i}: ray parameters must increase strictly")));
            }
        }
        Ok(Self { meta, rows })
    }

    /// Intensity at ray parameter `s` if that exact row (to 1e-12 relative)
    /// is present.
    pub fn lookup(&self, s: f64) -> Option<f64> {
        let tol = 1e-12 * s.abs().max(1.0);
        let idx = self.rows.partition_point(|&(t, _)| t < s - tol);
        self.rows
            .get(idx)
            .filter(|&&(t, _)| (t - s).abs() <= tol)
            .map(|&(_, v)| v)
    }

    /// Ray parameters `s` whose partner `s + tau` is also present.
    pub fn paired_radii(&self) -> Vec<f64> {
        let tau = self.meta.geometry.tau;
        self.rows
            .iter()
            .map(|&(s, _)| s)
            .filter(|&s| self.lookup(s + tau).is_some())
            .collect()
    }
}

/// Samples the intensity at every `s` in `radii` and at its partner
/// `s + tau`.
pub fn sample_ray<S: Scene>(scene: &S, meta: RayMeta, radii: &[f64]) -> Result<RayIntensityData> {
    if radii.is_empty() {
        return Err(Error::Config("no radii to sample".to_string()));
    }
    if radii.iter().any(|&s| !(s > 0.0) || !s.is_finite()) || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config(
            "radii must be positive and strictly increasing".to_string(),
        ));
    }
    if (scene.kappa() - meta.kappa).abs() > WAVE_VECTOR_TOL * meta.kappa
        || (scene.wave_vector() - meta.k).norm() > WAVE_VECTOR_TOL * meta.kappa
    {
        return Err(Error::Config(
            "ray metadata disagrees with the scene illumination".to_string(),
        ));
    }
    let tau = meta.geometry.tau;
    let mut all: Vec<f64> = radii.iter().flat_map(|&s| [s, s + tau]).collect();
    all.sort_by(f64::total_cmp);
    all.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    let rows = all
        .par_iter()
        .map(|&s| Ok((s, scene.intensity(meta.geometry.point(s))?)))
        .collect::<Result<Vec<_>>>()?;
    RayIntensityData::new(meta, rows)
}
