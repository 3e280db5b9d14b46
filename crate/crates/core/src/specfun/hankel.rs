use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest order accepted by [`hankel_m`].
pub const MAX_ORDER: u32 = 64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Above this modulus (and with `Re z >= 0`) the large-argument expansion is
/// used. Its smallest term there is below `e^{-2|z|}`, about 4e-18.
const ASYMPTOTIC_RADIUS: f64 = 20.0;

const RESCALE_LIMIT: f64 = 1e250;

fn check_argument(z: Complex64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Domain("Hankel functions are singular at z = 0".to_string()));
    }
    if z.im > 0.0 {
        return Err(Error::Domain(format!("argument {z} lies in the upper half-plane")));
    }
    Ok(())
}

fn check_result(z: Complex64, h: Complex64) -> Result<Complex64> {
    if h.re.is_finite() && h.im.is_finite() {
        Ok(h)
    } else {
        Err(Error::Range(format!("Hankel value overflows at z = {z}")))
    }
}

/// `H0` of the first kind.
pub fn hankel0(z: Complex64) -> Result<Complex64> {
    hankel01(z).map(|(h0, _)| h0)
}

/// `H1` of the first kind. Satisfies `H0' = -H1`.
pub fn hankel1(z: Complex64) -> Result<Complex64> {
    hankel01(z).map(|(_, h1)| h1)
}

/// `(H0(z), H1(z))` evaluated together.
///
/// Valid on the positive real axis and in the closed lower half-plane. On the
/// negative real axis the value is the limit from below.
pub fn hankel01(z: Complex64) -> Result<(Complex64, Complex64)> {
    check_argument(z)?;
    let (h0, h1) = if z.norm() >= ASYMPTOTIC_RADIUS && z.re >= 0.0 {
        (asymptotic(0, z), asymptotic(1, z))
    } else {
        miller(z)
    };
    Ok((check_result(z, h0)?, check_result(z, h1)?))
}

/// Large-argument expansion, summed until the terms stop decreasing.
fn asymptotic(nu: u32, z: Complex64) -> Complex64 {
    let nu2 = (nu * nu) as f64;
    let two_i_z = Complex64::new(0.0, 2.0) * z;
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for j in 1..=60u32 {
        let half = j as f64 - 0.5;
        term *= (half * half - nu2) / (j as f64) / two_i_z;
        let size = term.norm();
        if size >= last {
            break;
        }
        sum += term;
        last = size;
        if size <= 1e-17 * sum.norm() {
            break;
        }
    }
    // e^{iz} from the exact argument; the constant phase is applied separately
    // so that large |z| does not lose digits in `z - pi/4`.
    let carrier = Complex64::new(z.re.cos(), z.re.sin()) * (-z.im).exp();
    let shift = -(nu as f64) * FRAC_PI_2 - FRAC_PI_4;
    let phase = Complex64::new(shift.cos(), shift.sin());
    (Complex64::new(2.0 / PI, 0.0) / z).sqrt() * carrier * phase * sum
}

/// Principal logarithm, taking the branch from below on the negative axis.
fn log_lower(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re < 0.0 {
        Complex64::new((-z.re).ln(), -PI)
    } else {
        z.ln()
    }
}

/// Backward (Miller) recurrence for `J_n`, normalized with
/// `e^{iz} = J0 + 2 sum_{n>=1} i^n J_n`, followed by the Neumann series
/// for `Y0` and `Y1`.
fn miller(z: Complex64) -> (Complex64, Complex64) {
    let modulus = z.norm();
    let mut top = (modulus + 12.0 * modulus.cbrt() + 24.0).ceil() as usize;
    if top % 2 == 1 {
        top += 1;
    }
    let mut j = vec![Complex64::new(0.0, 0.0); top + 2];
    j[top] = Complex64::new(1e-30, 0.0);
    let inv_z = z.inv();
    for n in (1..=top).rev() {
        j[n - 1] = j[n] * (2.0 * n as f64) * inv_z - j[n + 1];
        if j[n - 1].norm() > RESCALE_LIMIT {
            for v in j[n - 1..].iter_mut() {
                *v /= RESCALE_LIMIT;
            }
        }
    }
    // i^n cycles through 1, i, -1, -i.
    let mut norm = j[0];
    for (n, v) in j.iter().enumerate().take(top + 1).skip(1) {
        let rotated = match n % 4 {
            0 => *v,
            1 => Complex64::new(-v.im, v.re),
            2 => -*v,
            _ => Complex64::new(v.im, -v.re),
        };
        norm += 2.0 * rotated;
    }
    let eiz = Complex64::new(z.re.cos(), z.re.sin()) * (-z.im).exp();
    // Divide by the modulus first: `eiz / norm` would square |norm| and
    // overflow for tiny arguments.
    let size = norm.norm();
    let scale = eiz * (norm.conj() / size) / size;
    for v in j.iter_mut() {
        *v *= scale;
    }

    let log_term = log_lower(z * 0.5) + EULER_GAMMA;
    let mut s0 = Complex64::new(0.0, 0.0);
    let mut s1 = Complex64::new(0.0, 0.0);
    let mut k = 1;
    while 2 * k < top {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * j[2 * k] / k as f64;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = (2.0 / PI) * log_term * j[0] - (4.0 / PI) * s0;
    let y1 = (2.0 / PI) * log_term * j[1] - (2.0 / PI) * inv_z * j[0] + (2.0 / PI) * s1;
    let i = Complex64::new(0.0, 1.0);
    (j[0] + i * y0, j[1] + i * y1)
}

/// `H_m(r)` for integer order `0 <= m <= 64` and real `r > 0`, by forward
/// recurrence `H_{m+1} = (2m/r) H_m - H_{m-1}`.
pub fn hankel_m(m: u32, r: f64) -> Result<Complex64> {
    Ok(hankel_seq(m, r)?[m as usize])
}

/// `[H_0(r), ..., H_m(r)]` from one forward recurrence.
pub fn hankel_seq(m: u32, r: f64) -> Result<Vec<Complex64>> {
    if m > MAX_ORDER {
        return Err(Error::Domain(format!("order {m} exceeds {MAX_ORDER}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let (h0, h1) = hankel01(Complex64::new(r, 0.0))?;
    let mut out = Vec::with_capacity(m as usize + 1);
    out.push(h0);
    if m >= 1 {
        out.push(h1);
    }
    for n in 1..m as usize {
        let next = out[n] * (2.0 * n as f64 / r) - out[n - 1];
        if !next.re.is_finite() || !next.im.is_finite() {
            return Err(Error::Range(format!(
                "recurrence overflows at order {} for r = {r}",
                n + 1
            )));
        }
        out.push(next);
    }
    Ok(out)
}
