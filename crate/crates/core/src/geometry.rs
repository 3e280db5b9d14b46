//! Plane vectors, measurement rays and radius ladders.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Point or direction in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Vec2 {
    fn from(v: [f64; 2]) -> Self {
        Vec2::new(v[0], v[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(phi: f64) -> Self {
        Self::new(phi.cos(), phi.sin())
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Polar angle in `(-pi, pi]`.
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// 2D cross product `self x other`.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Which of the two opposite rays on the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RaySign {
    /// `x1 + s theta`, `s > 0`.
    Plus,
    /// `x2 - s theta`, `s > 0`.
    Minus,
}

impl RaySign {
    pub fn factor(self) -> f64 {
        match self {
            RaySign::Plus => 1.0,
            RaySign::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RaySign::Plus => "plus",
            RaySign::Minus => "minus",
        }
    }
}

/// Default smallest admissible `|D|` for the pairing offset.
pub const DEFAULT_D_MIN: f64 = 0.5;

/// Tolerance for treating a ray direction as the excluded incident direction.
const PARALLEL_TOL: f64 = 1e-12;

/// One measurement ray `base + s * sign * theta`, `s > 0`, with the offset
/// `tau` used to pair `x` with `y = x + tau * direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayGeometry {
    pub base: Vec2,
    pub theta: Vec2,
    pub sign: RaySign,
    pub tau: f64,
}

impl RayGeometry {
    /// Normalizes `theta`; rejects zero or non-finite inputs and `tau <= 0`.
    pub fn new(base: Vec2, theta: Vec2, sign: RaySign, tau: f64) -> Result<Self> {
        let len = theta.norm();
        if !base.is_finite() || !theta.is_finite() || !(len > 0.0) {
            return Err(Error::Geometry(format!(
                "ray needs a finite base and a non-zero direction (base {base}, theta {theta})"
            )));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::Geometry(format!(
                "pairing offset tau must be positive, got {tau}"
            )));
        }
        Ok(Self {
            base,
            theta: theta * (1.0 / len),
            sign,
            tau,
        })
    }

    /// Unit direction of travel along the ray.
    pub fn direction(&self) -> Vec2 {
        self.theta * self.sign.factor()
    }

    pub fn point(&self, s: f64) -> Vec2 {
        self.base + self.direction() * s
    }

    /// `k . direction - kappa`, the phase rate of `e^{i(k x - kappa |x|)}`
    /// along the ray.
    pub fn alpha(&self, kappa: f64, k: Vec2) -> f64 {
        k.dot(self.direction()) - kappa
    }

    /// `D = 2 sin(tau (k . direction - kappa))`.
    pub fn d_value(&self, kappa: f64, k: Vec2) -> f64 {
        2.0 * (self.tau * self.alpha(kappa, k)).sin()
    }

    /// Checks the hypotheses needed to recover far-field data on this ray:
    /// the line is not parallel to `k` and `|D| >= d_min`.
    pub fn validate(&self, kappa: f64, k: Vec2, d_min: f64) -> Result<()> {
        let k_hat = k * (1.0 / k.norm());
        if (self.theta - k_hat).norm() < PARALLEL_TOL || (self.theta + k_hat).norm() < PARALLEL_TOL {
            return Err(Error::Geometry(format!(
                "ray direction {} is parallel to the incident direction {k_hat}; \
                 directions theta = +-k/|k| are excluded",
                self.theta
            )));
        }
        let d = self.d_value(kappa, k);
        if d.abs() < d_min {
            return Err(Error::Geometry(format!(
                "|D| = |2 sin(tau (k.theta - kappa))| = {:.3e} is below {d_min} for tau = {}; \
                 choose another tau",
                d.abs(),
                self.tau
            )));
        }
        Ok(())
    }
}

/// Pairing offset shared by both rays of a line with direction `theta`.
///
/// `tau = pi / (2 kappa)` makes `|D|` equal on both rays; a handful of other
/// candidates that put one ray exactly at `|D| = 2` are also tried and the
/// one with the largest `min(|D+|, |D-|)` wins.
pub fn default_tau(kappa: f64, k: Vec2, theta: Vec2) -> f64 {
    let theta = theta * (1.0 / theta.norm());
    let a_plus = (k.dot(theta) - kappa).abs();
    let a_minus = (-k.dot(theta) - kappa).abs();
    let score = |tau: f64| (tau * a_plus).sin().abs().min((tau * a_minus).sin().abs());
    let mut best = PI / (2.0 * kappa);
    let mut best_score = score(best);
    for a in [a_plus, a_minus] {
        if a <= 0.0 {
            continue;
        }
        for j in 0..4 {
            let tau = PI * (2 * j + 1) as f64 / (2.0 * a);
            let s = score(tau);
            if s > best_score + 1e-9 {
                best = tau;
                best_score = s;
            }
        }
    }
    best
}

/// Geometric ladder `start * ratio^i`, `i < count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderSpec {
    pub start: f64,
    pub ratio: f64,
    pub count: usize,
}

impl LadderSpec {
    pub fn new(start: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(start > 0.0) || !start.is_finite() {
            return Err(Error::Config(format!("ladder start must be positive, got {start}")));
        }
        if !(ratio > 1.0) || !ratio.is_finite() {
            return Err(Error::Config(format!("ladder ratio must exceed 1, got {ratio}")));
        }
        if count == 0 || count > 10_000 {
            return Err(Error::Config(format!("ladder count must be in 1..=10000, got {count}")));
        }
        Ok(Self { start, ratio, count })
    }

    /// Ladder spanning `[lo, hi]` with `count` points.
    pub fn spanning(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count < 2 || !(hi > lo) {
            return Err(Error::Config(format!("cannot span [{lo}, {hi}] with {count} points")));
        }
        Self::new(lo, (hi / lo).powf(1.0 / (count - 1) as f64), count)
    }

    /// Parses `start:ratio:count`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.trim().split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "radius ladder must look like start:ratio:count, got {text:?}"
            )));
        }
        let num = |s: &str, what: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("invalid ladder {what} {s:?}")))
        };
        let count = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("invalid ladder count {:?}", parts[2])))?;
        Self::new(num(parts[0], "start")?, num(parts[1], "ratio")?, count)
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.count)
            .map(|i| self.start * self.ratio.powi(i as i32))
            .collect()
    }

    /// Ladder snapped onto `start + n * 2 pi / |alpha|` so that
    /// `e^{i alpha s}` takes the same value at every rung; duplicates
    /// produced by snapping are dropped.
    pub fn phase_aligned(&self, alpha: f64) -> Vec<f64> {
        if alpha == 0.0 {
            return self.radii();
        }
        let period = 2.0 * PI / alpha.abs();
        let mut out: Vec<f64> = self
            .radii()
            .into_iter()
            .map(|g| self.start + ((g - self.start) / period).round() * period)
            .collect();
        out.dedup_by(|a, b| (*a - *b).abs() < 0.5 * period);
        out
    }
}

impl fmt::Display for LadderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.ratio, self.count)
    }
}

/// Parses `x,y` into a vector.
pub fn parse_vec2(text: &str) -> Result<Vec2> {
    let parts: Vec<&str> = text.trim().split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!(
            "expected two comma-separated numbers, got {text:?}"
        )));
    }
    let x = parts[0]
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("invalid number {:?}", parts[0])))?;
    let y = parts[1]
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("invalid number {:?}", parts[1])))?;
    let v = Vec2::new(x, y);
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite vector {text:?}")));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_value_for_perpendicular_ray() {
        let k = Vec2::new(0.0, 1.0);
        let ray = RayGeometry::new(Vec2::default(), Vec2::new(1.0, 0.0), RaySign::Plus, PI / 2.0).unwrap();
        assert!((ray.d_value(1.0, k) + 2.0).abs() < 1e-15);
        let minus = RayGeometry {
            sign: RaySign::Minus,
            ..ray
        };
        assert!((minus.d_value(1.0, k) + 2.0).abs() < 1e-15);
        assert!((default_tau(1.0, k, ray.theta) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn excluded_directions_are_rejected() {
        let k = Vec2::new(0.6, 0.8);
        for theta in [k, -k] {
            let ray = RayGeometry::new(Vec2::default(), theta, RaySign::Plus, 1.0).unwrap();
            assert!(matches!(ray.validate(1.0, k, 0.0), Err(Error::Geometry(_))));
        }
    }

    #[test]
    fn degenerate_tau_is_rejected_and_small_shift_repairs_it() {
        let k = Vec2::new(0.0, 1.0);
        // alpha = -1, so tau = pi gives D = 0.
        let ray = RayGeometry::new(Vec2::default(), Vec2::new(1.0, 0.0), RaySign::Plus, PI).unwrap();
        assert!(ray.validate(1.0, k, 1e-9).is_err());
        let shifted = RayGeometry { tau: PI * 1.01, ..ray };
        assert!(shifted.d_value(1.0, k).abs() > 0.0);
        assert!(shifted.validate(1.0, k, 1e-3).is_ok());
    }

    #[test]
    fn default_tau_keeps_both_rays_usable() {
        let k = Vec2::new(1.0, 0.0);
        for deg in [10.0f64, 40.0, 70.0, 100.0, 150.0] {
            let theta = Vec2::from_angle(deg.to_radians());
            let tau = default_tau(1.0, k, theta);
            for sign in [RaySign::Plus, RaySign::Minus] {
                let ray = RayGeometry::new(Vec2::default(), theta, sign, tau).unwrap();
                assert!(ray.d_value(1.0, k).abs() > 0.3, "theta {deg} deg");
            }
        }
    }

    #[test]
    fn ladder_parsing() {
        let l = LadderSpec::parse("100:2:12").unwrap();
        assert_eq!(l.radii().len(), 12);
        assert_eq!(l.radii()[11], 100.0 * 2f64.powi(11));
        assert!(LadderSpec::parse("100:2").is_err());
        assert!(LadderSpec::parse("100:1:4").is_err());
        assert!(LadderSpec::parse("-1:2:4").is_err());
        assert!(LadderSpec::parse("a:2:4").is_err());
    }

    #[test]
    fn aligned_ladder_has_common_phase() {
        let alpha = -0.7;
        let radii = LadderSpec::spanning(5.0, 5000.0, 20).unwrap().phase_aligned(alpha);
        let p0 = (alpha * radii[0]).rem_euclid(2.0 * PI);
        for s in &radii {
            let p = (alpha * s).rem_euclid(2.0 * PI);
            let diff = (p - p0).abs();
            assert!(diff.min(2.0 * PI - diff) < 1e-9);
        }
        assert!(radii.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn vector_parsing() {
        assert_eq!(parse_vec2("3,-2").unwrap(), Vec2::new(3.0, -2.0));
        assert!(parse_vec2("3").is_err());
        assert!(parse_vec2("nan,1").is_err());
    }
}
