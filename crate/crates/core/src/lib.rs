//! Hermite-series numerics for Gelfand–Shilov and Pilipović spaces.
//!
//! Functions and (ultra-)distributions are represented by truncated Hermite
//! expansions. On top of that representation the crate provides weights and
//! norms of Pilipović spaces, Gelfand–Shilov seminorm diagnostics, tensor
//! products with partial pairings, Fourier, short-time Fourier and Bargmann
//! transforms, and Riemann-sum convolutions.
//!
//! Every numerical type is generic over the scalar ([`Real`], implemented
//! for `f32` and `f64`); the aliases below fix the usual double-precision
//! choice.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convolution;
pub mod error;
pub mod fit;
pub mod hermite;
pub mod multiindex;
pub mod scalar;
pub mod spaces;
pub mod special;
pub mod tensor;
pub mod transforms;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result, Warning};
pub use hermite::{analyze, gauss_hermite_rule, hermite_eval, HermiteExpansion, Ladder, QuadratureRule, SampledFunction};
pub use multiindex::{factorial_power, graded_enumerate, AnisotropicOrder, MultiIndex};
pub use scalar::Real;

pub use num_complex::Complex;

/// Double-precision expansion.
pub type Expansion = HermiteExpansion<f64>;
/// Single-precision expansion.
pub type Expansion32 = HermiteExpansion<f32>;
/// Double-precision sampled function.
pub type Function = SampledFunction<f64>;
/// Double-precision complex scalar.
pub type C64 = Complex<f64>;
