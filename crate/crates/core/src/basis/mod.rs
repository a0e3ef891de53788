//! Position-space eigenfunctions, the mixed single-index basis and sampled
//! densities.
//!
//! Every state handled here (a product state, a `mu` state or a coherent
//! superposition) is reduced to an [`Expansion`]: a complex coefficient matrix
//! `C[n][m]` over product states `|n, m>`. Since each product state separates
//! into `phi_n(x) phi_m(y)`, grids and tensor-product quadratures evaluate the
//! 1D modes once per axis and contract with `C`.

mod eigen;
mod field;
mod mu;
mod overlap;

pub use eigen::{ln_normalization, normalization, Mode1D, ModeSample, MorseSystem};
pub use field::{density_grid, DensityMetadata, GridSpec, ScalarField2D};
pub use mu::{MixingCoefficients, MuBasis, MuContent, MuState};
pub use overlap::{gram_matrix, overlap, AxisMatrices, TensorQuadrature};

use num_complex::Complex64;

use crate::error::Result;

/// Coefficients `C[n][m]` of `sum C[n][m] |n, m>` for `0 <= n, m <= k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    dim: usize,
    coeffs: Vec<Complex64>,
}

impl Expansion {
    pub fn zeros(k: u32) -> Self {
        let dim = k as usize + 1;
        Self {
            dim,
            coeffs: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// The product state `|n, m>`.
    pub fn product(k: u32, n: u32, m: u32) -> Self {
        let mut e = Self::zeros(k);
        e.add(n, m, Complex64::new(1.0, 0.0));
        e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add(&mut self, n: u32, m: u32, value: Complex64) {
        self.coeffs[n as usize * self.dim + m as usize] += value;
    }

    pub fn coefficient(&self, n: u32, m: u32) -> Complex64 {
        self.coeffs[n as usize * self.dim + m as usize]
    }

    pub(crate) fn at(&self, n: usize, m: usize) -> Complex64 {
        self.coeffs[n * self.dim + m]
    }

    /// `sum |C|^2`, the squared norm for orthonormal modes.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Modes with a non-zero coefficient along x (first index).
    pub fn x_modes(&self) -> Vec<u32> {
        (0..self.dim)
            .filter(|&n| (0..self.dim).any(|m| self.at(n, m) != Complex64::new(0.0, 0.0)))
            .map(|n| n as u32)
            .collect()
    }

    /// Modes with a non-zero coefficient along y (second index).
    pub fn y_modes(&self) -> Vec<u32> {
        (0..self.dim)
            .filter(|&m| (0..self.dim).any(|n| self.at(n, m) != Complex64::new(0.0, 0.0)))
            .map(|m| m as u32)
            .collect()
    }

    /// Modes used on either axis, ascending.
    pub fn modes(&self) -> Vec<u32> {
        let mut all = self.x_modes();
        all.extend(self.y_modes());
        all.sort_unstable();
        all.dedup();
        all
    }

    /// `C^T`: the state reflected across `y = x`.
    pub fn transposed(&self) -> Self {
        let mut out = Self {
            dim: self.dim,
            coeffs: self.coeffs.clone(),
        };
        for n in 0..self.dim {
            for m in 0..self.dim {
                out.coeffs[m * self.dim + n] = self.at(n, m);
            }
        }
        out
    }
}

impl MorseSystem {
    /// Wavefunction of `expansion` at `(x, y)`.
    pub fn evaluate(&self, expansion: &Expansion, x: f64, y: f64) -> Result<Complex64> {
        let xs = expansion
            .x_modes()
            .into_iter()
            .map(|n| Ok((n as usize, self.mode(n)?.value(x))))
            .collect::<Result<Vec<_>>>()?;
        let ys = expansion
            .y_modes()
            .into_iter()
            .map(|m| Ok((m as usize, self.mode(m)?.value(y))))
            .collect::<Result<Vec<_>>>()?;
        let mut sum = Complex64::new(0.0, 0.0);
        for &(n, fx) in &xs {
            for &(m, fy) in &ys {
                sum += expansion.at(n, m) * (fx * fy);
            }
        }
        Ok(sum)
    }

    /// Wavefunction of a single-index state at `(x, y)`.
    pub fn mu_wavefunction(&self, state: &MuState, x: f64, y: f64) -> Result<Complex64> {
        self.evaluate(&state.expansion(self.k()), x, y)
    }
}
