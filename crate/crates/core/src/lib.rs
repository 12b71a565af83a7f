//! Numerical tools for weighted Fourier algebras on the unit circle.
//!
//! The crate is organised bottom-up:
//!
//! * [`weights`]: Beurling weights and finite-window checks of their growth conditions.
//! * [`series`]: finitely supported Laurent series, weighted norms and division by `α - z0`.
//! * [`approx_unit`]: the approximate identity `e_n` and its powers, with certified tails.
//! * [`ideals`]: closed-ideal hulls and jet membership.
//! * [`circle_sets`]: finite subsets of the circle, Carleson integrals, perfect-set constructions.
//! * [`spectral`]: inner functions, model-operator sections, power growth and dual programs.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx_unit;
pub mod circle_sets;
mod error;
pub mod ideals;
pub mod series;
pub mod spectral;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;
