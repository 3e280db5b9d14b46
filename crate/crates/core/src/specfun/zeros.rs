use std::f64::consts::PI;

use num_complex::Complex64;

use super::hankel::hankel01;
use crate::error::{Error, Result};

/// Largest number of zeros [`h0_zeros`] will search for.
pub const MAX_ZERO_COUNT: usize = 20;

// The zeros sit close to Im z = -ln(2)/2 just below the negative real axis.
const BOX_TOP: f64 = -0.05;
const BOX_BOTTOM: f64 = -1.5;
const BOX_WIDTH: f64 = PI;
const MAX_BOXES: usize = 4 * MAX_ZERO_COUNT + 8;

#[derive(Debug, Clone, Copy)]
struct Rect {
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
}

impl Rect {
    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re_min - slack
            && z.re <= self.re_max + slack
            && z.im >= self.im_min - slack
            && z.im <= self.im_max + slack
    }

    fn quadrants(&self) -> [Rect; 4] {
        let c = self.center();
        [
            Rect {
                re_max: c.re,
                im_max: c.im,
                ..*self
            },
            Rect {
                re_min: c.re,
                im_max: c.im,
                ..*self
            },
            Rect {
                re_max: c.re,
                im_min: c.im,
                ..*self
            },
            Rect {
                re_min: c.re,
                im_min: c.im,
                ..*self
            },
        ]
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

fn h0(z: Complex64) -> Result<Complex64> {
    Ok(hankel01(z)?.0)
}

/// Phase change of `H0` along a segment, bisecting until every sub-step turns
/// by less than a quarter turn.
fn phase_change(a: Complex64, b: Complex64, fa: Complex64, fb: Complex64, depth: u32) -> Result<f64> {
    let step = (fb / fa).arg();
    if step.abs() < PI / 4.0 {
        return Ok(step);
    }
    if depth > 40 {
        return Err(Error::Numeric(format!(
            "argument scan cannot resolve the phase of H0 between {a} and {b}"
        )));
    }
    let m = 0.5 * (a + b);
    let fm = h0(m)?;
    Ok(phase_change(a, m, fa, fm, depth + 1)? + phase_change(m, b, fm, fb, depth + 1)?)
}

/// Number of zeros of `H0` inside `rect` by the argument principle.
fn winding_number(rect: &Rect) -> Result<i64> {
    let corners = rect.corners();
    let mut total = 0.0;
    for side in 0..4 {
        let a = corners[side];
        let b = corners[(side + 1) % 4];
        // Seed each side with a few points so that the bisection starts from
        // a resolved grid.
        let pieces = 16;
        let mut prev = a;
        let mut f_prev = h0(a)?;
        for p in 1..=pieces {
            let t = p as f64 / pieces as f64;
            let z = a + (b - a) * t;
            let fz = h0(z)?;
            total += phase_change(prev, z, f_prev, fz, 0)?;
            prev = z;
            f_prev = fz;
        }
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-6 {
        return Err(Error::Numeric(format!(
            "winding number {turns} around {rect:?} is not an integer"
        )));
    }
    Ok(rounded as i64)
}

/// Newton iteration `z <- z + H0(z)/H1(z)`, using `H0' = -H1`.
fn newton(start: Complex64, rect: &Rect) -> Result<Complex64> {
    let mut z = start;
    for _ in 0..60 {
        let (f, g) = hankel01(z)?;
        let step = f / g;
        z += step;
        if !rect.contains(z, 1.0) {
            break;
        }
        if step.norm() <= 1e-15 * z.norm() {
            return Ok(z);
        }
    }
    Err(Error::Numeric(format!(
        "Newton refinement from {start} did not converge inside {rect:?}"
    )))
}

fn isolate(rect: Rect, depth: u32, found: &mut Vec<Complex64>) -> Result<()> {
    match winding_number(&rect)? {
        0 => Ok(()),
        1 => {
            let z = newton(rect.center(), &rect)?;
            found.push(z);
            Ok(())
        }
        n if n > 1 && depth < 8 => {
            for q in rect.quadrants() {
                isolate(q, depth + 1, found)?;
            }
            Ok(())
        }
        n => Err(Error::Numeric(format!(
            "could not isolate zeros in {rect:?} (winding number {n})"
        ))),
    }
}

/// The first `count` zeros of `H0` in the open lower half-plane, ordered by
/// increasing modulus.
///
/// Boxes of width `pi` along the strip `-1.5 <= Im z <= -0.05`, `Re z <= 0`
/// are scanned with the argument principle; each isolated zero is then
/// polished by Newton's method.
pub fn h0_zeros(count: usize) -> Result<Vec<Complex64>> {
    if count == 0 || count > MAX_ZERO_COUNT {
        return Err(Error::Domain(format!(
            "zero count must be in 1..={MAX_ZERO_COUNT}, got {count}"
        )));
    }
    let mut found = Vec::new();
    // One extra box past the last hit so that a zero straddling the
    // ordering boundary is not missed.
    let mut extra = 0;
    for b in 0..MAX_BOXES {
        let rect = Rect {
            re_min: -((b + 1) as f64) * BOX_WIDTH,
            re_max: -(b as f64) * BOX_WIDTH,
            im_min: BOX_BOTTOM,
            im_max: BOX_TOP,
        };
        isolate(rect, 0, &mut found)?;
        if found.len() >= count {
            extra += 1;
            if extra > 1 {
                break;
            }
        }
    }
    if found.len() < count {
        return Err(Error::Numeric(format!("found only {} of {count} zeros", found.len())));
    }
    found.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    found.dedup_by(|a, b| (*a - *b).norm() < 1e-9 * b.norm());
    found.truncate(count);
    for z in &found {
        let value = h0(*z)?.norm();
        if value >= 1e-10 || z.im >= 0.0 {
            return Err(Error::Numeric(format!("refined zero {z} has |H0| = {value:e}")));
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_limits() {
        assert!(h0_zeros(0).is_err());
        assert!(h0_zeros(21).is_err());
    }

    #[test]
    fn first_zero_location() {
        // Reference value from an independent arbitrary-precision evaluation.
        let z = h0_zeros(1).unwrap()[0];
        let expected = Complex64::new(-2.404_091_177_155_344, -0.340_502_152_956_141_07);
        assert!((z - expected).norm() < 1e-12, "{z}");
    }
}
