//! Spectrum, eigenfunctions and generalized coherent states of the
//! two-dimensional Morse oscillator.

// `!(x > 0.0)` style checks are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod coherent;
pub mod error;
pub mod params;
pub mod quadrature;
pub mod special;
pub mod spectrum;

pub use error::{MorseError, Result};
