use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest coefficient index served by [`asym_coeff`].
pub const MAX_ASYM_INDEX: u32 = 32;

/// Coefficient `C_{nu,j}` of the large-argument expansion
///
/// ```text
/// H_nu(r) ~ sqrt(2/(pi r)) e^{i(r - nu pi/2 - pi/4)} sum_j C_{nu,j} / r^j
/// C_{nu,j} = (1/2 - nu)_j (1/2 + nu)_j / (j! (2i)^j)
/// ```
///
/// for `nu` in {0, 1}. Values come from a table built once per process.
pub fn asym_coeff(nu: u32, j: u32) -> Result<Complex64> {
    if nu > 1 {
        return Err(Error::Domain(format!(
            "asym_coeff is tabulated for orders 0 and 1, got {nu}"
        )));
    }
    if j > MAX_ASYM_INDEX {
        return Err(Error::Domain(format!("coefficient index {j} exceeds {MAX_ASYM_INDEX}")));
    }
    static TABLE: OnceLock<[[Complex64; MAX_ASYM_INDEX as usize + 1]; 2]> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = [[Complex64::new(0.0, 0.0); MAX_ASYM_INDEX as usize + 1]; 2];
        for (nu, row) in t.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = asym_coeff_general(nu as u32, j as u32);
            }
        }
        t
    });
    Ok(table[nu as usize][j as usize])
}

/// Same coefficient for an arbitrary non-negative integer order.
///
/// The real factor is accumulated as a product of exactly representable
/// quarter-integers divided by `2(i+1)`, and the phase `(2i)^{-j} = (-i/2)^j`
/// is applied as an exact power of `-i`.
pub fn asym_coeff_general(nu: u32, j: u32) -> Complex64 {
    let nu2 = (nu as f64) * (nu as f64);
    let mut magnitude = 1.0_f64;
    for i in 0..j {
        let half = i as f64 + 0.5;
        magnitude *= (half * half - nu2) / (2.0 * (i as f64 + 1.0));
    }
    // (-i)^j
    match j % 4 {
        0 => Complex64::new(magnitude, 0.0),
        1 => Complex64::new(0.0, -magnitude),
        2 => Complex64::new(-magnitude, 0.0),
        _ => Complex64::new(0.0, magnitude),
    }
}
