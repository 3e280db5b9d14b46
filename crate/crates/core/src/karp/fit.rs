use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lstsq::lstsq;
use crate::specfun::hankel01;

/// Condition number above which a fit is refused.
const MAX_CONDITION: f64 = 1e13;

/// Coefficients of `H0(kappa r) sum_j A_j / r^j + H1(kappa r) sum_j B_j / r^j`
/// fitted to samples along one ray.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KarpFit {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub condition: f64,
    pub max_residual: f64,
}

/// Least-squares fit of samples `values[i]` at `radii[i]` by `J + 1` terms in
/// each Hankel factor.
///
/// Columns `H_nu(kappa r) (r1/r)^j` are used, with `r1` the smallest radius,
/// so that all columns have comparable size. The fit is well posed because
/// such a sum vanishes identically only when every coefficient vanishes.
pub fn fit_from_samples(kappa: f64, radii: &[f64], values: &[Complex64], truncation: usize) -> Result<KarpFit> {
    if radii.len() != values.len() {
        return Err(Error::Config("radii and values differ in length".to_string()));
    }
    let unknowns = 2 * (truncation + 1);
    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    if sorted.len() < unknowns {
        return Err(Error::Config(format!(
            "need at least {unknowns} distinct radii, got {}",
            sorted.len()
        )));
    }
    if !(sorted[0] > 0.0) || !sorted.iter().all(|r| r.is_finite()) {
        return Err(Error::Config("radii must be positive and finite".to_string()));
    }
    let r1 = sorted[0];
    let mut design = Vec::with_capacity(radii.len() * unknowns);
    for &r in radii {
        let (h0, h1) = hankel01(Complex64::new(kappa * r, 0.0))?;
        let q = r1 / r;
        design.extend((0..=truncation).map(|j| h0 * q.powi(j as i32)));
        design.extend((0..=truncation).map(|j| h1 * q.powi(j as i32)));
    }
    let sol = lstsq(radii.len(), unknowns, &design, values)?;
    if sol.condition > MAX_CONDITION {
        return Err(Error::Numeric(format!(
            "fit is ill-conditioned (condition number {:.3e}); use more or wider-spread radii",
            sol.condition
        )));
    }
    let unscale = |j: usize, c: Complex64| c * r1.powi(j as i32);
    let a = (0..=truncation).map(|j| unscale(j, sol.coefficients[j])).collect();
    let b = (0..=truncation)
        .map(|j| unscale(j, sol.coefficients[truncation + 1 + j]))
        .collect();
    Ok(KarpFit {
        a,
        b,
        condition: sol.condition,
        max_residual: sol.max_residual,
    })
}
