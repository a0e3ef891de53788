//! Bound-state spectrum of the isotropic 2D Morse well and its exact
//! degeneracy structure.
//!
//! Energies are handled in units of `hbar^2 beta^2 / 2m`. With `p = k + eps`
//! the scaled energy of `|n, m>` is
//!
//! ```text
//! -[(k-n)^2 + (k-m)^2 + 2 eps (2k-n-m) + 2 eps^2]
//! ```
//!
//! and dropping the constant `2 eps^2` gives the shifted energy
//! `-(a + 2 eps b)` with the integer [`LevelKey`] `(a, b)`.

mod export;
mod levels;
mod ordering;

pub use export::{write_spectrum_csv, write_spectrum_json, SpectrumRow};
pub(crate) use levels::ExactLevel;
pub use levels::{count_summary, enumerate_levels, Classification, CountSummary, LevelRecord};
pub use ordering::{crossing_report, order_spectrum, NearCrossing, OrderedSpectrum};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{MorseError, Result};

/// Quantum numbers `(n, m)` of the product state `|n, m>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuantumPair {
    pub n: u32,
    pub m: u32,
}

impl QuantumPair {
    pub const fn new(n: u32, m: u32) -> Self {
        Self { n, m }
    }

    pub const fn swapped(self) -> Self {
        Self {
            n: self.m,
            m: self.n,
        }
    }

    pub const fn is_diagonal(self) -> bool {
        self.n == self.m
    }
}

impl fmt::Display for QuantumPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.m)
    }
}

/// Integer pair `(a, b)` with `a = (k-n)^2 + (k-m)^2` and `b = 2k - n - m`.
///
/// For irrational `p` two states are degenerate exactly when their keys match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LevelKey {
    pub a: u64,
    pub b: u64,
}

impl LevelKey {
    /// `-(a + 2 eps b)`.
    pub fn shifted_energy(self, epsilon: f64) -> f64 {
        -(self.a as f64 + 2.0 * epsilon * self.b as f64)
    }
}

pub(crate) fn check_range(k: u32, n: u32, m: u32) -> Result<()> {
    if n > k || m > k {
        return Err(MorseError::OutOfRange { k, n, m });
    }
    Ok(())
}

pub fn level_key(k: u32, n: u32, m: u32) -> Result<LevelKey> {
    check_range(k, n, m)?;
    Ok(key_unchecked(k, n, m))
}

pub(crate) fn key_unchecked(k: u32, n: u32, m: u32) -> LevelKey {
    let (i, j) = (u64::from(k - n), u64::from(k - m));
    LevelKey {
        a: i * i + j * j,
        b: i + j,
    }
}

/// Shifted energy `-[(k-n)^2 + (k-m)^2 + 2 eps (2k-n-m)]`; maximum 0 at `(k, k)`.
pub fn shifted_energy(k: u32, epsilon: f64, n: u32, m: u32) -> Result<f64> {
    Ok(level_key(k, n, m)?.shifted_energy(epsilon))
}

/// Scaled energy `-[(p-n)^2 + (p-m)^2]` written through `p = k + eps`.
pub fn scaled_energy(k: u32, epsilon: f64, n: u32, m: u32) -> Result<f64> {
    Ok(shifted_energy(k, epsilon, n, m)? - 2.0 * epsilon * epsilon)
}
