//! Log-gamma and generalized Laguerre polynomials.
//!
//! The Laguerre routines run the three-term recurrence with a running log
//! scale so that very high degrees at large arguments (where the polynomial
//! alone exceeds the double range) can still be combined with a small
//! exponential prefactor in log space.

use std::f64::consts::PI;

use crate::error::{MorseError, Result};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(MorseError::Domain(format!(
            "log_gamma needs a positive finite argument, got {x}"
        )));
    }
    Ok(ln_gamma_positive(x))
}

fn ln_gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        // reflection; sin(pi x) > 0 on (0, 1/2)
        return (PI / (PI * x).sin()).ln() - ln_gamma_positive(1.0 - x);
    }
    let z = x - 1.0;
    let mut series = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + series.ln()
}

/// `L_n^alpha(x)` via the three-term recurrence.
///
/// Overflows to infinity for large degree and argument; use
/// [`laguerre_scaled`] when the result feeds a log-space product.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    laguerre_scaled(n, alpha, x).value()
}

/// `d/dx L_n^alpha(x) = -L_{n-1}^{alpha+1}(x)`.
pub fn laguerre_derivative(n: usize, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        -laguerre(n - 1, alpha + 1.0, x)
    }
}

/// A value stored as `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        mantissa: 0.0,
        log_scale: 0.0,
    };

    pub fn value(self) -> f64 {
        self.mantissa * self.log_scale.exp()
    }

    /// `self * exp(log_factor)` evaluated without intermediate overflow.
    pub fn times_exp(self, log_factor: f64) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        self.mantissa * (self.log_scale + log_factor).exp()
    }
}

const RESCALE_ABOVE: f64 = 1e150;

/// `L_n^alpha(x)` as a [`Scaled`] value; never overflows for finite input.
pub fn laguerre_scaled(n: usize, alpha: f64, x: f64) -> Scaled {
    let mut prev = 1.0; // L_0
    if n == 0 {
        return Scaled {
            mantissa: prev,
            log_scale: 0.0,
        };
    }
    let mut curr = 1.0 + alpha - x; // L_1
    let mut log_scale = 0.0;
    for j in 2..=n {
        let jf = j as f64;
        let next = ((2.0 * jf - 1.0 + alpha - x) * curr - (jf - 1.0 + alpha) * prev) / jf;
        prev = curr;
        curr = next;
        let size = curr.abs();
        if size > RESCALE_ABOVE {
            prev /= size;
            curr /= size;
            log_scale += size.ln();
        }
    }
    Scaled {
        mantissa: curr,
        log_scale,
    }
}

/// `d/dx L_n^alpha` as a [`Scaled`] value.
pub fn laguerre_derivative_scaled(n: usize, alpha: f64, x: f64) -> Scaled {
    if n == 0 {
        return Scaled::ZERO;
    }
    let inner = laguerre_scaled(n - 1, alpha + 1.0, x);
    Scaled {
        mantissa: -inner.mantissa,
        log_scale: inner.log_scale,
    }
}

/// `d^2/dx^2 L_n^alpha = L_{n-2}^{alpha+2}` as a [`Scaled`] value.
pub fn laguerre_second_derivative_scaled(n: usize, alpha: f64, x: f64) -> Scaled {
    if n < 2 {
        return Scaled::ZERO;
    }
    laguerre_scaled(n - 2, alpha + 2.0, x)
}
