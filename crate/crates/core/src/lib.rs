//! Vahlen-matrix model of the Möbius group, the spinor principal series it
//! induces, and numerical/exact verification of the conformal covariance of
//! odd powers of the flat Dirac operator and of the sphere operators
//! `D(D^2 - 1)...(D^2 - m^2)`.

// `!(x > 0.0)` is used on purpose so that NaN parameters are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clifford;
pub mod compact;
pub mod error;
pub mod field;
pub mod jet;
pub mod principal;
pub mod quad;
pub mod residue;
pub mod scalar;
pub mod special;
pub mod sphere;
pub mod spinor;
pub mod suites;
pub mod vahlen;

pub use error::{Error, Result};
