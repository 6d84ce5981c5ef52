//! Exact arithmetic for the elliptic curves `E_m : y^2 = x^3 - m^2 x + (pqr)^2`.
//!
//! The crate builds family curves, certifies that their rational torsion is
//! trivial, certifies `rank E_m(Q) >= 2` through nonzero classes in
//! `E(Q)/2E(Q)`, and sweeps parameter grids looking for a third independent
//! class. Every computation is exact: integers are arbitrary precision and
//! rationals are kept in lowest terms.

pub mod arith;
pub mod curve;
pub mod descent;
pub mod error;
pub mod family;
pub mod finite_field;
pub mod harness;
mod serde_util;
pub mod torsion;

pub use curve::{Curve, Point};
pub use error::{Error, Result};
pub use family::{FamilyParams, HypothesisReport};
