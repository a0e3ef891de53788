use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MorseError, Result};
use crate::spectrum::{ExactLevel, OrderedSpectrum};

/// A choice of ladder strengths `f(i)` on an ordered spectrum.
///
/// Implementations must return `f(0) = 0` followed by strictly increasing
/// positive values, one per level.
pub trait LadderFunction {
    fn name(&self) -> &str;
    fn values(&self, spectrum: &OrderedSpectrum) -> Result<Vec<f64>>;
}

/// `f(i) = E_i - E_0`, the energy of level `i` above the ground level.
///
/// Differences are taken on the exact integer keys before converting to
/// floating point, so the small gaps stay accurate for deep wells.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnergyDifference;

impl LadderFunction for EnergyDifference {
    fn name(&self) -> &str {
        "energy-difference"
    }

    fn values(&self, spectrum: &OrderedSpectrum) -> Result<Vec<f64>> {
        let levels = spectrum.levels();
        let Some(ground) = levels.first() else {
            return Ok(Vec::new());
        };
        let param = spectrum.parameter();
        let epsilon = param.epsilon();
        let q = param.rational_parts().map_or(1, |(_, q)| q);
        Ok(levels
            .iter()
            .map(|level| match (ground.exact, level.exact) {
                (ExactLevel::Scaled(s0), ExactLevel::Scaled(s)) => (s0 - s) as f64 / q as f64,
                _ => {
                    let da = i128::from(ground.key.a) - i128::from(level.key.a);
                    let db = i128::from(ground.key.b) - i128::from(level.key.b);
                    da as f64 + 2.0 * epsilon * db as f64
                }
            })
            .collect())
    }
}

/// Ladder strengths `f(0..=xi)` and their running log-products
/// `log_factorials[n] = ln [f(n)]! = sum_{1 <= m <= n} ln f(m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderSpectrum {
    f: Vec<f64>,
    log_factorials: Vec<f64>,
}

impl LadderSpectrum {
    /// Checks `f(0) = 0` and strict increase.
    pub fn new(f: Vec<f64>) -> Result<Self> {
        match f.first() {
            None => return Err(MorseError::Domain("ladder needs at least one level".into())),
            Some(&f0) if f0 != 0.0 => {
                return Err(MorseError::Domain(format!(
                    "ladder must start at f(0) = 0, got {f0}"
                )))
            }
            _ => {}
        }
        for (i, pair) in f.windows(2).enumerate() {
            if !(pair[1] > pair[0]) || !pair[1].is_finite() {
                return Err(MorseError::Domain(format!(
                    "ladder must increase strictly: f({}) = {}, f({}) = {}",
                    i,
                    pair[0],
                    i + 1,
                    pair[1]
                )));
            }
        }
        let mut log_factorials = Vec::with_capacity(f.len());
        log_factorials.push(0.0);
        for value in &f[1..] {
            log_factorials.push(log_factorials.last().copied().unwrap_or(0.0) + value.ln());
        }
        Ok(Self { f, log_factorials })
    }

    pub fn from_function(
        spectrum: &OrderedSpectrum,
        function: &dyn LadderFunction,
    ) -> Result<Self> {
        Self::new(function.values(spectrum)?)
    }

    /// Highest index.
    pub fn xi(&self) -> usize {
        self.f.len() - 1
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// `f(i)`, zero outside `0..=xi`.
    pub fn f(&self, i: usize) -> f64 {
        self.f.get(i).copied().unwrap_or(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    pub fn log_factorials(&self) -> &[f64] {
        &self.log_factorials
    }

    /// `B- |mu_i> = sqrt(f(i)) |mu_{i-1}>`, with `B- |mu_0> = 0`.
    pub fn lower(&self, coefficients: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); coefficients.len()];
        for i in 1..coefficients.len() {
            out[i - 1] = coefficients[i] * self.f(i).sqrt();
        }
        out
    }

    /// `B+ |mu_i> = sqrt(f(i+1)) |mu_{i+1}>`, with `f(xi + 1) = 0`.
    pub fn raise(&self, coefficients: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); coefficients.len()];
        for i in 0..coefficients.len().saturating_sub(1) {
            out[i + 1] = coefficients[i] * self.f(i + 1).sqrt();
        }
        out
    }
}

/// Ladder with the energy-difference strengths.
pub fn ladder_f(spectrum: &OrderedSpectrum) -> Result<LadderSpectrum> {
    LadderSpectrum::from_function(spectrum, &EnergyDifference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{decompose, RationalityMode};
    use crate::spectrum::order_spectrum;

    fn three_pi() -> LadderSpectrum {
        ladder_f(&order_spectrum(&decompose("3pi", RationalityMode::Irrational).unwrap()).unwrap())
            .unwrap()
    }

    #[test]
    fn first_gap_at_three_pi() {
        let ladder = three_pi();
        assert_eq!(ladder.xi(), 54);
        assert_eq!(ladder.f(0), 0.0);
        let eps = 3.0 * std::f64::consts::PI - 9.0;
        assert!((ladder.f(1) - (17.0 + 2.0 * eps)).abs() < 1e-12);
        assert!((ladder.f(1) - 17.8496).abs() < 1e-4);
        assert_eq!(ladder.f(55), 0.0);
    }

    #[test]
    fn strengths_match_float_energies() {
        let spectrum =
            order_spectrum(&decompose("3pi", RationalityMode::Irrational).unwrap()).unwrap();
        let ladder = ladder_f(&spectrum).unwrap();
        let energies = spectrum.shifted_energies();
        for (i, e) in energies.iter().enumerate() {
            assert!((ladder.f(i) - (e - energies[0])).abs() < 1e-12 * e.abs().max(1.0));
        }
        assert!(ladder.values().windows(2).all(|w| w[1] > w[0]));
        // largest gap is the (9,9) level: a0 = 162, b0 = 18 against (0, 0)
        assert!((ladder.f(54) - (162.0 + 36.0 * (3.0 * std::f64::consts::PI - 9.0))).abs() < 1e-12);
    }

    #[test]
    fn rational_strengths_are_exact() {
        let spectrum =
            order_spectrum(&decompose("7.25", RationalityMode::Rational { r: 1, q: 4 }).unwrap())
                .unwrap();
        let ladder = ladder_f(&spectrum).unwrap();
        let energies = spectrum.shifted_energies();
        for (i, e) in energies.iter().enumerate() {
            assert!((ladder.f(i) - (e - energies[0])).abs() < 1e-12);
        }
    }

    #[test]
    fn log_factorials_accumulate() {
        let ladder = LadderSpectrum::new(vec![0.0, 2.0, 3.0, 4.0]).unwrap();
        let expected = [0.0, 2f64.ln(), 6f64.ln(), 24f64.ln()];
        for (a, b) in ladder.log_factorials().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(LadderSpectrum::new(vec![1.0, 2.0]).is_err());
        assert!(LadderSpectrum::new(vec![0.0, 2.0, 2.0]).is_err());
    }

    #[test]
    fn ladder_actions_respect_the_ends() {
        let ladder = LadderSpectrum::new(vec![0.0, 1.0, 4.0]).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(ladder.lower(&[one, zero, zero]), vec![zero; 3]);
        assert_eq!(
            ladder.lower(&[zero, zero, one]),
            vec![zero, Complex64::new(2.0, 0.0), zero]
        );
        assert_eq!(ladder.raise(&[zero, zero, one]), vec![zero; 3]);
        assert_eq!(ladder.raise(&[one, zero, zero]), vec![zero, one, zero]);
    }
}
