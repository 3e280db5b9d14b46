//! Two-dimensional Helmholtz radiation fields: Hankel functions, Karp
//! expansions, far-field recovery from intensity on two opposite rays, and
//! reconstruction of the scattered field.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod error;
pub mod geometry;
pub mod io;
pub mod karp;
mod lstsq;
pub mod recover;
pub mod scenes;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
