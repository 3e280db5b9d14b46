//! Truncated Fourier series in the polar angle.
//!
//! An [`AngularFunction`] stores the amplitudes `f_m` of `sum_m f_m e^{i m phi}`
//! for `|m| <= M`. Second derivatives and the antipodal map `phi -> phi + pi`
//! act diagonally on the modes, so both are exact.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation order used when none is given.
pub const DEFAULT_TRUNCATION: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularFunction {
    truncation: usize,
    /// `modes[m + truncation]` holds the amplitude of `e^{i m phi}`.
    modes: Vec<Complex64>,
}

impl Default for AngularFunction {
    fn default() -> Self {
        Self::zero(DEFAULT_TRUNCATION)
    }
}

impl AngularFunction {
    pub fn zero(truncation: usize) -> Self {
        Self {
            truncation,
            modes: vec![Complex64::new(0.0, 0.0); 2 * truncation + 1],
        }
    }

    pub fn constant(truncation: usize, value: Complex64) -> Self {
        let mut f = Self::zero(truncation);
        f.modes[truncation] = value;
        f
    }

    /// Single harmonic `amplitude * e^{i m phi}`.
    pub fn harmonic(truncation: usize, m: i64, amplitude: Complex64) -> Result<Self> {
        let mut f = Self::zero(truncation);
        f.set_mode(m, amplitude)?;
        Ok(f)
    }

    /// Builds a function from `(m, amplitude)` pairs; repeated modes add up.
    pub fn from_modes(truncation: usize, modes: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        let mut f = Self::zero(truncation);
        for (m, a) in modes {
            let current = f.mode(m);
            f.set_mode(m, current + a)?;
        }
        Ok(f)
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    fn index(&self, m: i64) -> Option<usize> {
        let t = self.truncation as i64;
        (-t..=t).contains(&m).then(|| (m + t) as usize)
    }

    /// Amplitude of `e^{i m phi}`; zero outside the truncation window.
    pub fn mode(&self, m: i64) -> Complex64 {
        self.index(m)
            .map(|i| self.modes[i])
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    pub fn set_mode(&mut self, m: i64, amplitude: Complex64) -> Result<()> {
        let i = self
            .index(m)
            .ok_or_else(|| Error::Config(format!("mode {m} outside truncation window |m| <= {}", self.truncation)))?;
        self.modes[i] = amplitude;
        Ok(())
    }

    /// Iterator over `(m, amplitude)` for every mode in the window.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let t = self.truncation as i64;
        self.modes.iter().enumerate().map(move |(i, a)| (i as i64 - t, *a))
    }

    /// `sum_m f_m e^{i m phi}`.
    pub fn eval(&self, phi: f64) -> Complex64 {
        self.modes()
            .filter(|(_, a)| *a != Complex64::new(0.0, 0.0))
            .map(|(m, a)| {
                let angle = m as f64 * phi;
                a * Complex64::new(angle.cos(), angle.sin())
            })
            .sum()
    }

    fn map_modes(&self, factor: impl Fn(i64) -> f64) -> Self {
        let t = self.truncation as i64;
        Self {
            truncation: self.truncation,
            modes: self
                .modes
                .iter()
                .enumerate()
                .map(|(i, a)| a * factor(i as i64 - t))
                .collect(),
        }
    }

    /// `d^2 f / d phi^2`: mode `m` scaled by `-m^2`.
    pub fn second_derivative(&self) -> Self {
        self.map_modes(|m| -((m * m) as f64))
    }

    /// `phi -> f(phi + pi)`: mode `m` scaled by `(-1)^m`.
    pub fn antipode(&self) -> Self {
        self.map_modes(|m| if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 })
    }

    /// Splits `f` into parts that are even and odd under the antipodal map.
    pub fn parity_split(&self) -> (Self, Self) {
        let even = self.map_modes(|m| if m.rem_euclid(2) == 0 { 1.0 } else { 0.0 });
        let odd = self.map_modes(|m| if m.rem_euclid(2) == 0 { 0.0 } else { 1.0 });
        (even, odd)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            truncation: self.truncation,
            modes: self.modes.iter().map(|a| a * factor).collect(),
        }
    }

    /// Largest mode amplitude.
    pub fn max_abs(&self) -> f64 {
        self.modes.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.modes.iter().all(|a| *a == Complex64::new(0.0, 0.0))
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(
            self.truncation, other.truncation,
            "angular functions with different truncations"
        );
        Self {
            truncation: self.truncation,
            modes: self.modes.iter().zip(&other.modes).map(|(a, b)| op(*a, *b)).collect(),
        }
    }
}

// Binary operators require equal truncation and panic otherwise; mixing
// truncations is a construction bug, not a data condition.
impl Add for &AngularFunction {
    type Output = AngularFunction;
    fn add(self, rhs: Self) -> AngularFunction {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &AngularFunction {
    type Output = AngularFunction;
    fn sub(self, rhs: Self) -> AngularFunction {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &AngularFunction {
    type Output = AngularFunction;
    fn neg(self) -> AngularFunction {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for &AngularFunction {
    type Output = AngularFunction;
    fn mul(self, rhs: Complex64) -> AngularFunction {
        self.scale(rhs)
    }
}

impl Mul<f64> for &AngularFunction {
    type Output = AngularFunction;
    fn mul(self, rhs: f64) -> AngularFunction {
        self.scale(Complex64::new(rhs, 0.0))
    }
}
