//! Karp expansions of two-dimensional radiation solutions.
//!
//! Outside a disk of radius `rho` a radiation solution has the convergent form
//!
//! ```text
//! psi(r, phi) = H0(kappa r) sum_j F_j(phi) / r^j + H1(kappa r) sum_j G_j(phi) / r^j
//! ```
//!
//! and the (generally divergent) far-field form
//!
//! ```text
//! psi(r, phi) ~ sqrt(2/(pi kappa r)) e^{i(kappa r - pi/4)} sum_j f_j(phi) / r^j.
//! ```
//!
//! This module evaluates the first form, generates its coefficients by the
//! angular recursion, checks their antipodal parities and converts between
//! `(F_j, G_j)` and `f_j` in both directions.

mod fit;
mod residual;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::AngularFunction;
use crate::error::{Error, Result};
use crate::specfun::{asym_coeff, hankel01, MAX_ASYM_INDEX};

pub use fit::{fit_from_samples, KarpFit};
pub use residual::{helmholtz_residual, HelmholtzResidual};

/// Default number of orders kept for verification work.
pub const DEFAULT_ORDER: usize = 8;

/// Largest order the recursion and the far-field conversions accept.
pub const MAX_ORDER: usize = MAX_ASYM_INDEX as usize;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `C_{0,j} / kappa^j` and `C_{1,j} / kappa^j`.
fn scaled_coeffs(kappa: f64, j: usize) -> (Complex64, Complex64) {
    let scale = kappa.powi(-(j as i32));
    (
        asym_coeff(0, j as u32).expect("index checked against MAX_ORDER") * scale,
        asym_coeff(1, j as u32).expect("index checked against MAX_ORDER") * scale,
    )
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("wavenumber must be positive, got {kappa}")))
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        Err(Error::Config(format!("order {order} exceeds {MAX_ORDER}")))
    } else {
        Ok(())
    }
}

/// Karp coefficients `F_j`, `G_j` for `j = 0..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KarpExpansion {
    kappa: f64,
    f: Vec<AngularFunction>,
    g: Vec<AngularFunction>,
    rho: f64,
}

impl KarpExpansion {
    pub fn new(kappa: f64, f: Vec<AngularFunction>, g: Vec<AngularFunction>, rho: f64) -> Result<Self> {
        check_kappa(kappa)?;
        if f.len() != g.len() || f.is_empty() {
            return Err(Error::Config(format!(
                "Karp expansion needs equally many F and G coefficients (got {} and {})",
                f.len(),
                g.len()
            )));
        }
        check_order(f.len() - 1)?;
        let truncation = f[0].truncation();
        if f.iter().chain(&g).any(|c| c.truncation() != truncation) {
            return Err(Error::Config(
                "Karp coefficients must share one angular truncation".to_string(),
            ));
        }
        if !(rho >= 0.0) {
            return Err(Error::Config(format!("validity radius must be >= 0, got {rho}")));
        }
        Ok(Self { kappa, f, g, rho })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Highest coefficient index `N`.
    pub fn order(&self) -> usize {
        self.f.len() - 1
    }

    pub fn truncation(&self) -> usize {
        self.f[0].truncation()
    }

    pub fn f(&self) -> &[AngularFunction] {
        &self.f
    }

    pub fn g(&self) -> &[AngularFunction] {
        &self.g
    }

    /// Mutable access for building perturbed expansions in checks.
    pub fn f_mut(&mut self) -> &mut [AngularFunction] {
        &mut self.f
    }

    pub fn g_mut(&mut self) -> &mut [AngularFunction] {
        &mut self.g
    }

    /// Value of the expansion at polar point `(r, phi)`, `r > rho`.
    pub fn eval(&self, r: f64, phi: f64) -> Result<Complex64> {
        if !(r > self.rho) || !r.is_finite() {
            return Err(Error::Domain(format!(
                "radius {r} is not outside the validity radius {}",
                self.rho
            )));
        }
        let (h0, h1) = hankel01(Complex64::new(self.kappa * r, 0.0))?;
        let (mut sf, mut sg) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        // Horner in 1/r.
        for (fj, gj) in self.f.iter().zip(&self.g).rev() {
            sf = sf / r + fj.eval(phi);
            sg = sg / r + gj.eval(phi);
        }
        Ok(h0 * sf + h1 * sg)
    }

    /// Coefficients `F_0..F_N`, `G_0..G_N` generated from `(F_0, G_0)` by
    ///
    /// ```text
    /// F_{n+1} = -((n+1)^2 G_n + G_n'') / (2 kappa (n+1))
    /// G_{n+1} =  (n^2 F_n + F_n'')     / (2 kappa (n+1))
    /// ```
    pub fn extend_recursion(kappa: f64, f0: AngularFunction, g0: AngularFunction, order: usize) -> Result<Self> {
        check_kappa(kappa)?;
        check_order(order)?;
        if f0.truncation() != g0.truncation() {
            return Err(Error::Config("F0 and G0 must share one angular truncation".to_string()));
        }
        let mut f = vec![f0];
        let mut g = vec![g0];
        for n in 0..order {
            let n1 = (n + 1) as f64;
            let denom = 2.0 * kappa * n1;
            let next_f = &(&(&g[n] * (n1 * n1)) + &g[n].second_derivative()) * (-1.0 / denom);
            let nn = (n * n) as f64;
            let next_g = &(&(&f[n] * nn) + &f[n].second_derivative()) * (1.0 / denom);
            f.push(next_f);
            g.push(next_g);
        }
        Self::new(kappa, f, g, 0.0)
    }

    /// Per-index residuals of `F_n(phi) = (-1)^n F_n(phi + pi)` and
    /// `G_n(phi) = (-1)^{n+1} G_n(phi + pi)`.
    pub fn check_symmetry(&self) -> SymmetryReport {
        let entries = self
            .f
            .iter()
            .zip(&self.g)
            .enumerate()
            .map(|(n, (fn_, gn))| {
                let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
                let f_res = (fn_ - &(&fn_.antipode() * sign)).max_abs();
                let g_res = (gn + &(&gn.antipode() * sign)).max_abs();
                SymmetryEntry {
                    index: n,
                    f_residual: f_res,
                    g_residual: g_res,
                }
            })
            .collect();
        SymmetryReport { entries }
    }

    /// Far-field coefficients
    /// `f_n = F_n - i G_n + sum_{j=1..n} (C_{0j} F_{n-j} - i C_{1j} G_{n-j}) / kappa^j`.
    pub fn to_farfield(&self) -> FarFieldSeries {
        let f = (0..=self.order())
            .map(|n| {
                let mut acc = &self.f[n] - &(&self.g[n] * I);
                for j in 1..=n {
                    let (c0, c1) = scaled_coeffs(self.kappa, j);
                    acc = &acc + &(&(&self.f[n - j] * c0) - &(&self.g[n - j] * (I * c1)));
                }
                acc
            })
            .collect();
        FarFieldSeries { kappa: self.kappa, f }
    }

    /// Coefficient values at one angle.
    pub fn at_angle(&self, phi: f64) -> KarpPoint {
        KarpPoint {
            kappa: self.kappa,
            f: self.f.iter().map(|c| c.eval(phi)).collect(),
            g: self.g.iter().map(|c| c.eval(phi)).collect(),
        }
    }
}

/// Per-index output of [`KarpExpansion::check_symmetry`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryEntry {
    pub index: usize,
    pub f_residual: f64,
    pub g_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub entries: Vec<SymmetryEntry>,
}

impl SymmetryReport {
    pub fn max_residual(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.f_residual.max(e.g_residual))
            .fold(0.0, f64::max)
    }

    /// Indices whose residual exceeds `tol`.
    pub fn violations(&self, tol: f64) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|e| e.f_residual.max(e.g_residual) > tol)
            .map(|e| e.index)
            .collect()
    }
}

/// Far-field coefficients `f_0..f_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarFieldSeries {
    pub kappa: f64,
    pub f: Vec<AngularFunction>,
}

impl FarFieldSeries {
    pub fn new(kappa: f64, f: Vec<AngularFunction>) -> Result<Self> {
        check_kappa(kappa)?;
        if f.is_empty() {
            return Err(Error::Config("far-field series needs at least f_0".to_string()));
        }
        check_order(f.len() - 1)?;
        Ok(Self { kappa, f })
    }

    pub fn order(&self) -> usize {
        self.f.len() - 1
    }

    /// Karp coefficients recovered order by order; applied mode-wise since
    /// the antipodal map is diagonal in the Fourier basis.
    pub fn to_karp(&self) -> Result<KarpExpansion> {
        check_order(self.order())?;
        let truncation = self.f[0].truncation();
        let mut f = vec![AngularFunction::zero(truncation); self.f.len()];
        let mut g = vec![AngularFunction::zero(truncation); self.f.len()];
        let t = truncation as i64;
        for m in -t..=t {
            let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let here: Vec<Complex64> = self.f.iter().map(|c| c.mode(m)).collect();
            let there: Vec<Complex64> = here.iter().map(|v| v * sign).collect();
            let point = karp_from_farfield(self.kappa, &here, &there)?;
            for n in 0..self.f.len() {
                f[n].set_mode(m, point.f[n])?;
                g[n].set_mode(m, point.g[n])?;
            }
        }
        KarpExpansion::new(self.kappa, f, g, 0.0)
    }
}

/// Karp coefficient values `F_j(phi)`, `G_j(phi)` at a single angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KarpPoint {
    pub kappa: f64,
    pub f: Vec<Complex64>,
    pub g: Vec<Complex64>,
}

impl KarpPoint {
    pub fn order(&self) -> usize {
        self.f.len().saturating_sub(1)
    }

    /// Values at the antipodal angle from the parity relations.
    pub fn antipode(&self) -> KarpPoint {
        let sign = |n: usize| if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        KarpPoint {
            kappa: self.kappa,
            f: self.f.iter().enumerate().map(|(n, v)| v * sign(n)).collect(),
            g: self.g.iter().enumerate().map(|(n, v)| -v * sign(n)).collect(),
        }
    }

    /// Expansion value at radius `r` along this angle.
    pub fn eval(&self, r: f64) -> Result<Complex64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("radius must be positive, got {r}")));
        }
        let (h0, h1) = hankel01(Complex64::new(self.kappa * r, 0.0))?;
        let (mut sf, mut sg) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for (fj, gj) in self.f.iter().zip(&self.g).rev() {
            sf = sf / r + fj;
            sg = sg / r + gj;
        }
        Ok(h0 * sf + h1 * sg)
    }

    /// Far-field values `f_n(phi)` implied by these coefficients.
    pub fn to_farfield(&self) -> Vec<Complex64> {
        (0..self.f.len())
            .map(|n| {
                let mut acc = self.f[n] - I * self.g[n];
                for j in 1..=n {
                    let (c0, c1) = scaled_coeffs(self.kappa, j);
                    acc += c0 * self.f[n - j] - I * c1 * self.g[n - j];
                }
                acc
            })
            .collect()
    }

    /// Residual of the order-`n` 2x2 system against far-field data.
    pub fn system_residual(&self, at_phi: &[Complex64], at_antipode: &[Complex64]) -> Vec<f64> {
        let here = self.to_farfield();
        let there = self.antipode().to_farfield();
        here.iter()
            .zip(there.iter())
            .zip(at_phi.iter().zip(at_antipode))
            .map(|((h, t), (a, b))| (h - a).norm().max((t - b).norm()))
            .collect()
    }
}

/// Solves, order by order, for `F_n(phi)` and `G_n(phi)` from far-field
/// values at `phi` and `phi + pi`:
///
/// ```text
/// F_n - i G_n = f_n(phi) - sum_{j=1..n} (C_{0j} F_{n-j} - i C_{1j} G_{n-j}) / kappa^j
/// F_n + i G_n = (-1)^n (f_n(phi+pi) - sum_{j=1..n} (-1)^{n-j} (C_{0j} F_{n-j} + i C_{1j} G_{n-j}) / kappa^j)
/// ```
pub fn karp_from_farfield(kappa: f64, at_phi: &[Complex64], at_antipode: &[Complex64]) -> Result<KarpPoint> {
    check_kappa(kappa)?;
    if at_phi.len() != at_antipode.len() || at_phi.is_empty() {
        return Err(Error::Config(format!(
            "need the same number of far-field orders on both rays (got {} and {})",
            at_phi.len(),
            at_antipode.len()
        )));
    }
    check_order(at_phi.len() - 1)?;
    let mut f: Vec<Complex64> = Vec::with_capacity(at_phi.len());
    let mut g: Vec<Complex64> = Vec::with_capacity(at_phi.len());
    for n in 0..at_phi.len() {
        let mut minus = at_phi[n];
        let mut plus_sum = Complex64::new(0.0, 0.0);
        for j in 1..=n {
            let (c0, c1) = scaled_coeffs(kappa, j);
            minus -= c0 * f[n - j] - I * c1 * g[n - j];
            let sign = if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
            plus_sum += sign * (c0 * f[n - j] + I * c1 * g[n - j]);
        }
        let outer = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        let plus = outer * (at_antipode[n] - plus_sum);
        f.push(0.5 * (minus + plus));
        g.push((plus - minus) / (2.0 * I));
    }
    Ok(KarpPoint { kappa, f, g })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::hankel_m;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);
    const ZERO: Complex64 = Complex64::new(0.0, 0.0);

    fn harmonic(m: i64, a: Complex64) -> AngularFunction {
        AngularFunction::harmonic(8, m, a).unwrap()
    }

    fn zero() -> AngularFunction {
        AngularFunction::zero(8)
    }

    #[test]
    fn monopole_and_dipole_evaluation() {
        let mono = KarpExpansion::new(1.0, vec![harmonic(0, ONE)], vec![zero()], 0.0).unwrap();
        let dip = KarpExpansion::new(1.0, vec![zero()], vec![harmonic(1, ONE)], 0.0).unwrap();
        for &r in &[0.5, 2.0, 17.0] {
            let (h0, h1) = hankel01(Complex64::new(r, 0.0)).unwrap();
            assert!((mono.eval(r, 0.4).unwrap() - h0).norm() < 1e-15);
            let phase = Complex64::from_polar(1.0, 0.4);
            assert!((dip.eval(r, 0.4).unwrap() - h1 * phase).norm() < 1e-14);
        }
    }

    #[test]
    fn quadrupole_matches_order_two_hankel() {
        for &kappa in &[1.0, 2.5] {
            let k = KarpExpansion::new(
                kappa,
                vec![harmonic(2, -ONE), zero()],
                vec![zero(), harmonic(2, ONE * (2.0 / kappa))],
                0.0,
            )
            .unwrap();
            for &r in &[1.0, 3.0, 10.0] {
                let phi: f64 = 0.9;
                let expected = hankel_m(2, kappa * r).unwrap() * Complex64::from_polar(1.0, 2.0 * phi);
                let got = k.eval(r, phi).unwrap();
                assert!((got - expected).norm() < 1e-12 * expected.norm());
            }
        }
    }

    #[test]
    fn eval_rejects_points_inside_validity_disk() {
        let k = KarpExpansion::new(1.0, vec![harmonic(0, ONE)], vec![zero()], 2.0).unwrap();
        assert!(matches!(k.eval(2.0, 0.0), Err(Error::Domain(_))));
        assert!(k.eval(2.1, 0.0).is_ok());
    }

    #[test]
    fn recursion_examples() {
        let mono = KarpExpansion::extend_recursion(1.0, harmonic(0, ONE), zero(), 6).unwrap();
        assert!(mono.f()[1..].iter().chain(mono.g()).all(|c| c.is_zero()));

        let dip = KarpExpansion::extend_recursion(1.0, zero(), harmonic(1, ONE), 6).unwrap();
        assert!(dip.f().iter().chain(&dip.g()[1..]).all(|c| c.max_abs() < 1e-15));

        let kappa = 2.0;
        let quad = KarpExpansion::extend_recursion(kappa, harmonic(2, -ONE), zero(), 4).unwrap();
        assert_eq!(quad.g()[1], harmonic(2, ONE * (2.0 / kappa)));
        assert!(quad.f()[1].is_zero());
        assert!(quad.f()[2].is_zero());
        assert!(quad.f()[3..].iter().chain(&quad.g()[2..]).all(|c| c.is_zero()));
    }

    #[test]
    fn symmetry_examples() {
        let mono = KarpExpansion::extend_recursion(1.0, harmonic(0, ONE), zero(), 4).unwrap();
        assert_eq!(mono.check_symmetry().max_residual(), 0.0);

        let mut bad = KarpExpansion::extend_recursion(1.0, harmonic(2, ONE), harmonic(1, ONE), 4).unwrap();
        assert!(bad.check_symmetry().max_residual() < 1e-13);
        bad.f_mut()[1] = &bad.f()[1] + &harmonic(0, ONE);
        assert_eq!(bad.check_symmetry().violations(1e-13), vec![1]);
    }

    #[test]
    fn farfield_examples() {
        let mono = KarpExpansion::extend_recursion(1.0, harmonic(0, ONE), zero(), 2).unwrap();
        let ff = mono.to_farfield();
        assert_eq!(ff.f[0], harmonic(0, ONE));
        assert_eq!(ff.f[1], harmonic(0, Complex64::new(0.0, -1.0 / 8.0)));

        let dip = KarpExpansion::new(1.0, vec![zero()], vec![harmonic(1, ONE)], 0.0).unwrap();
        assert_eq!(dip.to_farfield().f[0], harmonic(1, -I));
    }

    #[test]
    fn leading_order_inversion() {
        let p = karp_from_farfield(1.0, &[ONE], &[ONE]).unwrap();
        assert_eq!((p.f[0], p.g[0]), (ONE, ZERO));

        // Dipole at phi = 0: f0(0) = -i, f0(pi) = +i.
        let p = karp_from_farfield(1.0, &[-I], &[I]).unwrap();
        assert!((p.f[0] - ZERO).norm() < 1e-16 && (p.g[0] - ONE).norm() < 1e-16);
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        assert!(karp_from_farfield(1.0, &[ONE, ONE], &[ONE]).is_err());
        assert!(karp_from_farfield(0.0, &[ONE], &[ONE]).is_err());
        assert!(KarpExpansion::new(1.0, vec![zero()], vec![], 0.0).is_err());
        assert!(KarpExpansion::extend_recursion(1.0, zero(), zero(), 33).is_err());
    }
}
