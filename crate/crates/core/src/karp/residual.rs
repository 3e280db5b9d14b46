use serde::{Deserialize, Serialize};

use super::KarpExpansion;
use crate::error::{Error, Result};

/// Finite-difference Helmholtz residual measured with two step sizes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HelmholtzResidual {
    pub step: f64,
    /// Largest `|Lap psi + kappa^2 psi|` over the grid with step `step`.
    pub coarse: f64,
    /// Same with step `step / 2`.
    pub fine: f64,
    /// `log2(coarse / fine)`; close to 2 for a true solution.
    pub rate: f64,
    /// Set when the fine residual is within reach of rounding error, so the
    /// rate is not meaningful.
    pub cancellation_warning: bool,
}

fn max_residual(k: &KarpExpansion, grid: &[(f64, f64)], h: f64) -> Result<(f64, f64)> {
    let kappa2 = k.kappa() * k.kappa();
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for &(r, phi) in grid {
        let dphi = h / r;
        let c = k.eval(r, phi)?;
        let rp = k.eval(r + h, phi)?;
        let rm = k.eval(r - h, phi)?;
        let pp = k.eval(r, phi + dphi)?;
        let pm = k.eval(r, phi - dphi)?;
        let d_rr = (rp - 2.0 * c + rm) / (h * h);
        let d_r = (rp - rm) / (2.0 * h);
        let d_pp = (pp - 2.0 * c + pm) / (dphi * dphi);
        let lap = d_rr + d_r / r + d_pp / (r * r);
        worst = worst.max((lap + kappa2 * c).norm());
        scale = scale.max(c.norm());
    }
    Ok((worst, scale))
}

/// Polar-Laplacian residual of the expansion on `grid` of `(r, phi)` points,
/// with radial step `h` and angular step `h / r`, and again with `h / 2`.
pub fn helmholtz_residual(k: &KarpExpansion, grid: &[(f64, f64)], h: f64) -> Result<HelmholtzResidual> {
    if grid.is_empty() {
        return Err(Error::Config("residual grid is empty".to_string()));
    }
    if !(h > 0.0) {
        return Err(Error::Config(format!("step must be positive, got {h}")));
    }
    for &(r, _) in grid {
        if !(r > 1.1 * k.rho()) || r - h <= k.rho() {
            return Err(Error::Domain(format!(
                "grid radius {r} too close to the validity radius {}",
                k.rho()
            )));
        }
    }
    let (coarse, scale) = max_residual(k, grid, h)?;
    let (fine, _) = max_residual(k, grid, h / 2.0)?;
    let rounding = 16.0 * f64::EPSILON * scale / (h * h / 4.0);
    Ok(HelmholtzResidual {
        step: h,
        coarse,
        fine,
        rate: (coarse / fine).log2(),
        cancellation_warning: fine < 10.0 * rounding,
    })
}
