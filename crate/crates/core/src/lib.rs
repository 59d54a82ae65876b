//! Crouzeix ratios and extremal Blaschke products for small dense complex
//! matrices.
//!
//! The crate computes `sup ‖f(A)‖₂ / max_{W(A)} |f|` for matrices whose
//! numerical range `W(A)` is a disk or an ellipse, by composing a conformal
//! map of `W(A)` onto the unit disk with a search over Blaschke products of
//! degree at most `n − 1`. Closed-form oracles for four structured families
//! live in [`cases`].
//!
//! Everything here is pure computation on `alloc` collections; IO, file
//! formats and the command line live in the companion `crouzeix` crate.
#![no_std]
#![forbid(unsafe_code)]
// guards of the form `!(x <= tol)` also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod blaschke;
pub mod cases;
pub mod conformal;
pub mod elliptic;
mod error;
pub mod extremal;
pub mod matcore;
pub mod numrange;
pub mod ratio;

pub use blaschke::BlaschkeProduct;
pub use conformal::ConformalMap;
pub use elliptic::EllipticParams;
pub use error::{Error, Result};
pub use extremal::{ExtremalResult, SearchConfig};
pub use matcore::{ComplexMatrix, SingularTriplet};
pub use num_complex::Complex64 as C64;
pub use numrange::{BoundaryCurve, EllipseGeometry, RangeShape};
pub use ratio::{crouzeix_ratio, RatioReport};
