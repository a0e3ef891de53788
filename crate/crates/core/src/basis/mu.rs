use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Expansion;
use crate::error::{MorseError, Result};
use crate::spectrum::{Classification, OrderedSpectrum};

const NORM_TOLERANCE: f64 = 1e-12;

/// Weights `(gamma, delta)` of `gamma |n,m> + delta |m,n>`, `n > m`, with
/// `|gamma|^2 + |delta|^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingCoefficients {
    gamma: Complex64,
    delta: Complex64,
}

impl MixingCoefficients {
    /// Rejects pairs whose squared norm differs from 1 by more than `1e-12`.
    pub fn new(gamma: Complex64, delta: Complex64) -> Result<Self> {
        let norm = gamma.norm_sqr() + delta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(MorseError::Domain(format!(
                "|gamma|^2 + |delta|^2 = {norm}, expected 1"
            )));
        }
        Ok(Self { gamma, delta })
    }

    /// Rescales any non-zero pair onto the unit sphere.
    pub fn normalized(gamma: Complex64, delta: Complex64) -> Result<Self> {
        let norm = (gamma.norm_sqr() + delta.norm_sqr()).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(MorseError::Domain(
                "gamma and delta cannot both vanish".into(),
            ));
        }
        Self::new(gamma / norm, delta / norm)
    }

    /// `gamma = delta = 1/sqrt(2)`.
    pub fn symmetric() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { gamma: h, delta: h }
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    pub fn delta(&self) -> Complex64 {
        self.delta
    }

    /// `(delta, gamma)`: mirrors densities across `y = x`.
    pub fn swapped(&self) -> Self {
        Self {
            gamma: self.delta,
            delta: self.gamma,
        }
    }
}

impl Default for MixingCoefficients {
    fn default() -> Self {
        Self::symmetric()
    }
}

/// Content of one single-index state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MuContent {
    /// `|n, n>`.
    Diagonal(u32),
    /// `gamma |n, m> + delta |m, n>` with `n > m`.
    Mixed {
        n: u32,
        m: u32,
        coeffs: MixingCoefficients,
    },
}

/// Element `mu_index` of the non-degenerate basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuState {
    pub index: usize,
    pub content: MuContent,
}

impl MuState {
    /// Product-state expansion in a well with top level `k`.
    pub fn expansion(&self, k: u32) -> Expansion {
        let mut expansion = Expansion::zeros(k);
        self.accumulate(&mut expansion, Complex64::new(1.0, 0.0));
        expansion
    }

    /// Adds `weight * |mu>` into `expansion`.
    pub(crate) fn accumulate(&self, expansion: &mut Expansion, weight: Complex64) {
        match self.content {
            MuContent::Diagonal(n) => expansion.add(n, n, weight),
            MuContent::Mixed { n, m, coeffs } => {
                expansion.add(n, m, weight * coeffs.gamma);
                expansion.add(m, n, weight * coeffs.delta);
            }
        }
    }

    /// Label such as `|4,4>` or `g|3,1>+d|1,3>`.
    pub fn label(&self) -> String {
        match self.content {
            MuContent::Diagonal(n) => format!("|{n},{n}>"),
            MuContent::Mixed { n, m, .. } => format!("g|{n},{m}>+d|{m},{n}>"),
        }
    }
}

/// The single-indexed basis `mu_0 .. mu_xi` built on an ordered spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct MuBasis {
    spectrum: OrderedSpectrum,
    mixing: MixingCoefficients,
    overrides: BTreeMap<usize, MixingCoefficients>,
    states: Vec<MuState>,
}

impl MuBasis {
    /// One `(gamma, delta)` pair for every doublet. Fails on accidental levels.
    pub fn new(spectrum: OrderedSpectrum, mixing: MixingCoefficients) -> Result<Self> {
        for (index, level) in spectrum.levels().iter().enumerate() {
            if level.classification == Classification::Accidental {
                return Err(MorseError::AccidentalLevel {
                    index,
                    multiplicity: level.multiplicity(),
                });
            }
        }
        let mut basis = Self {
            spectrum,
            mixing,
            overrides: BTreeMap::new(),
            states: Vec::new(),
        };
        basis.rebuild();
        Ok(basis)
    }

    /// Replaces the shared pair on one doublet.
    pub fn with_override(mut self, index: usize, coeffs: MixingCoefficients) -> Result<Self> {
        match self.spectrum.level(index) {
            Some(level) if level.classification == Classification::Doublet => {
                self.overrides.insert(index, coeffs);
                self.rebuild();
                Ok(self)
            }
            Some(_) => Err(MorseError::Domain(format!("mu_{index} is not a doublet"))),
            None => Err(MorseError::Domain(format!(
                "mu_{index} is beyond xi = {}",
                self.xi()
            ))),
        }
    }

    fn rebuild(&mut self) {
        self.states = self
            .spectrum
            .levels()
            .iter()
            .enumerate()
            .map(|(index, level)| {
                // members are sorted with the n > m partner first
                let first = level.members[0];
                let content = if first.is_diagonal() {
                    MuContent::Diagonal(first.n)
                } else {
                    MuContent::Mixed {
                        n: first.n,
                        m: first.m,
                        coeffs: *self.overrides.get(&index).unwrap_or(&self.mixing),
                    }
                };
                MuState { index, content }
            })
            .collect();
    }

    pub fn spectrum(&self) -> &OrderedSpectrum {
        &self.spectrum
    }

    pub fn mixing(&self) -> MixingCoefficients {
        self.mixing
    }

    pub fn k(&self) -> u32 {
        self.spectrum.parameter().k()
    }

    pub fn xi(&self) -> usize {
        self.spectrum.xi()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[MuState] {
        &self.states
    }

    pub fn state(&self, index: usize) -> Result<&MuState> {
        self.states
            .get(index)
            .ok_or_else(|| MorseError::Domain(format!("mu_{index} is beyond xi = {}", self.xi())))
    }

    /// `sum_i weights[i] |mu_i>` as a product-state expansion.
    pub fn combine(&self, weights: &[Complex64]) -> Expansion {
        let mut expansion = Expansion::zeros(self.k());
        for (state, &w) in self.states.iter().zip(weights) {
            state.accumulate(&mut expansion, w);
        }
        expansion
    }
}
