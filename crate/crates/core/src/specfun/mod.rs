//! Hankel functions of the first kind on the positive real axis and in the
//! closed lower half-plane, their large-argument coefficients, and the zeros
//! of `H0` below the real axis.

mod asym;
mod hankel;
mod zeros;

pub use asym::{asym_coeff, asym_coeff_general, MAX_ASYM_INDEX};
pub use hankel::{hankel0, hankel01, hankel1, hankel_m, hankel_seq, MAX_ORDER};
pub use zeros::{h0_zeros, MAX_ZERO_COUNT};
