//! Constructive shallow-network approximation of spectral Barron functions, measured in
//! weighted Sobolev norms on bounded domains and on all of ℝ^d.
//!
//! The crate is organised bottom-up: [`catalog`] holds closed-form targets, [`weights`] and
//! [`norms`] measure them, [`dictionary`] defines ridge atoms, [`sampler`] draws networks
//! from the integral representation, and [`embedding`] / [`experiments`] turn all of that
//! into checkable ratios and convergence rates.

// Parameter guards are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod dictionary;
pub mod embedding;
pub mod error;
pub mod experiments;
pub mod function;
pub mod norms;
pub mod numerics;
pub mod sampler;
pub mod weights;

pub use catalog::{barron_norm, fourier_lebesgue_norm, FreqQuadrature, FreqSettings, TargetFunction};
pub use error::{Error, ErrorClass, Result};
pub use function::SmoothFunction;
