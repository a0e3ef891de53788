use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LadderSpectrum;
use crate::basis::{Expansion, MuBasis};
use crate::error::{MorseError, Result};

/// `ln sum exp(terms)` without overflow.
fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Truncated generalized coherent state
/// `|Psi> = N^{-1/2} sum_{n <= xi} Psi^n / sqrt([f(n)]!) |mu_n>`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    psi: Complex64,
    ladder: LadderSpectrum,
    ln_normalization: f64,
    ln_magnitudes: Vec<f64>,
    coefficients: Vec<Complex64>,
}

/// Builds the coherent state of amplitude `psi` on `ladder`.
pub fn coherent_coefficients(psi: Complex64, ladder: &LadderSpectrum) -> Result<CoherentState> {
    if !(psi.re.is_finite() && psi.im.is_finite()) {
        return Err(MorseError::Domain(format!(
            "coherence amplitude must be finite, got {psi}"
        )));
    }
    let lf = ladder.log_factorials();
    let (ln_normalization, ln_magnitudes) = if psi == Complex64::new(0.0, 0.0) {
        let mut ln = vec![f64::NEG_INFINITY; lf.len()];
        ln[0] = 0.0;
        (0.0, ln)
    } else {
        let ln_psi = psi.norm().ln();
        let ln_n = log_sum_exp(
            lf.iter()
                .enumerate()
                .map(|(n, l)| 2.0 * n as f64 * ln_psi - l),
        );
        let ln = lf
            .iter()
            .enumerate()
            .map(|(n, l)| n as f64 * ln_psi - 0.5 * l - 0.5 * ln_n)
            .collect();
        (ln_n, ln)
    };
    let phase = psi.arg();
    let coefficients = ln_magnitudes
        .iter()
        .enumerate()
        .map(|(n, &ln)| Complex64::from_polar(ln.exp(), n as f64 * phase))
        .collect();
    Ok(CoherentState {
        psi,
        ladder: ladder.clone(),
        ln_normalization,
        ln_magnitudes,
        coefficients,
    })
}

impl CoherentState {
    pub fn psi(&self) -> Complex64 {
        self.psi
    }

    pub fn ladder(&self) -> &LadderSpectrum {
        &self.ladder
    }

    pub fn xi(&self) -> usize {
        self.ladder.xi()
    }

    /// `c_0 ..= c_xi`; entries below the smallest double read as zero.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `ln |c_n|`, finite wherever `c_n` is non-zero in exact arithmetic.
    pub fn ln_magnitudes(&self) -> &[f64] {
        &self.ln_magnitudes
    }

    /// `ln N(Psi)` with `N = sum |Psi|^{2n} / [f(n)]!`.
    pub fn ln_normalization(&self) -> f64 {
        self.ln_normalization
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Product-state expansion through the mixing coefficients of `basis`.
    pub fn expansion(&self, basis: &MuBasis) -> Result<Expansion> {
        if basis.len() != self.coefficients.len() {
            return Err(MorseError::Inconsistent(format!(
                "coherent state has {} coefficients but the basis has {} states",
                self.coefficients.len(),
                basis.len()
            )));
        }
        Ok(basis.combine(&self.coefficients))
    }

    /// `<B->` in this state.
    pub fn lowering_expectation(&self) -> Complex64 {
        let lowered = self.ladder.lower(&self.coefficients);
        self.coefficients
            .iter()
            .zip(&lowered)
            .map(|(c, l)| c.conj() * l)
            .sum()
    }

    /// Magnitudes and phases for serialization.
    pub fn dump(&self, basis: &MuBasis) -> CoherentDump {
        let mixing = basis.mixing();
        CoherentDump {
            p_text: basis.spectrum().parameter().p_text().to_string(),
            mode: basis.spectrum().parameter().mode().to_string(),
            gamma: [mixing.gamma().re, mixing.gamma().im],
            delta: [mixing.delta().re, mixing.delta().im],
            psi: [self.psi.re, self.psi.im],
            xi: self.xi(),
            ln_normalization: self.ln_normalization,
            coefficients: self
                .ln_magnitudes
                .iter()
                .enumerate()
                .map(|(index, &ln)| CoefficientEntry {
                    index,
                    magnitude: ln.exp(),
                    ln_magnitude: ln.is_finite().then_some(ln),
                    phase: index as f64 * self.psi.arg(),
                })
                .collect(),
        }
    }
}

/// One coherent-state coefficient in polar form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub index: usize,
    pub magnitude: f64,
    /// `None` for coefficients that vanish exactly.
    pub ln_magnitude: Option<f64>,
    pub phase: f64,
}

/// JSON form of a coherent state together with its basis settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentDump {
    pub p_text: String,
    pub mode: String,
    pub gamma: [f64; 2],
    pub delta: [f64; 2],
    pub psi: [f64; 2],
    pub xi: usize,
    pub ln_normalization: f64,
    pub coefficients: Vec<CoefficientEntry>,
}

impl CoherentDump {
    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }
}

/// Monomial `Psi^power / sqrt([f(order)]!)`, the common factor
/// `N^{-1/2}` left implicit.
type Monomial = (usize, usize);

/// `|| B- |Psi> - Psi |Psi> ||` from the ladder action.
///
/// Each component is kept as an integer combination of monomials, so the
/// cancellation between `B-` and multiplication by `Psi` happens exactly;
/// only the surviving terms are evaluated, in log space.
pub fn bg_residual(state: &CoherentState) -> f64 {
    let xi = state.xi();
    let ket: Vec<BTreeMap<Monomial, i64>> =
        (0..=xi).map(|n| BTreeMap::from([((n, n), 1)])).collect();

    let mut residual: Vec<BTreeMap<Monomial, i64>> = vec![BTreeMap::new(); xi + 1];
    // B-: sqrt(f(i)) Psi^j / sqrt([f(i)]!) = Psi^j / sqrt([f(i-1)]!) on |mu_{i-1}>
    for (i, terms) in ket.iter().enumerate().skip(1) {
        for (&(power, order), &c) in terms {
            debug_assert_eq!(order, i);
            *residual[i - 1].entry((power, order - 1)).or_default() += c;
        }
    }
    for (i, terms) in ket.iter().enumerate() {
        for (&(power, order), &c) in terms {
            *residual[i].entry((power + 1, order)).or_default() -= c;
        }
    }

    let ln_psi = state.psi.norm().ln();
    let phase = state.psi.arg();
    let lf = state.ladder.log_factorials();
    let ln_components: Vec<f64> = residual
        .iter()
        .filter_map(|terms| {
            let live: Vec<(Monomial, i64)> = terms
                .iter()
                .filter(|(_, &c)| c != 0)
                .map(|(&m, &c)| (m, c))
                .collect();
            if live.is_empty() {
                return None;
            }
            // ln of each |term|, then the complex sum relative to the largest
            let ln_terms: Vec<f64> = live
                .iter()
                .map(|&((power, order), c)| {
                    power as f64 * ln_psi - 0.5 * lf[order] + (c.abs() as f64).ln()
                })
                .collect();
            let top = ln_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if top == f64::NEG_INFINITY {
                return None;
            }
            let sum: Complex64 = live
                .iter()
                .zip(&ln_terms)
                .map(|(&((power, _), c), &ln)| {
                    Complex64::from_polar(
                        (ln - top).exp() * c.signum() as f64,
                        power as f64 * phase,
                    )
                })
                .sum();
            let norm = sum.norm();
            (norm > 0.0).then(|| top + norm.ln())
        })
        .collect();
    let ln_sq = log_sum_exp(ln_components.iter().map(|l| 2.0 * l));
    (0.5 * ln_sq - 0.5 * state.ln_normalization).exp()
}

/// `|Psi|^{xi+1} / sqrt([f(xi)]! N(Psi))`.
pub fn bg_residual_analytic(state: &CoherentState) -> f64 {
    if state.psi == Complex64::new(0.0, 0.0) {
        return 0.0;
    }
    let xi = state.xi();
    ((xi + 1) as f64 * state.psi.norm().ln()
        - 0.5 * state.ladder.log_factorials()[xi]
        - 0.5 * state.ln_normalization)
        .exp()
}

/// `ln` of [`bg_residual_analytic`], usable when the residual underflows.
pub fn ln_bg_residual_analytic(state: &CoherentState) -> f64 {
    let xi = state.xi();
    (xi + 1) as f64 * state.psi.norm().ln()
        - 0.5 * state.ladder.log_factorials()[xi]
        - 0.5 * state.ln_normalization
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent::ladder_f;
    use crate::params::{decompose, RationalityMode};
    use crate::spectrum::order_spectrum;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};
    use proptest::prelude::*;

    fn ladder() -> LadderSpectrum {
        ladder_f(&order_spectrum(&decompose("3pi", RationalityMode::Irrational).unwrap()).unwrap())
            .unwrap()
    }

    #[test]
    fn zero_amplitude_is_the_ground_state() {
        let s = coherent_coefficients(Complex64::new(0.0, 0.0), &ladder()).unwrap();
        assert_eq!(s.coefficients()[0], Complex64::new(1.0, 0.0));
        assert!(s.coefficients()[1..]
            .iter()
            .all(|c| *c == Complex64::new(0.0, 0.0)));
        assert_eq!(bg_residual(&s), 0.0);
        assert_eq!(bg_residual_analytic(&s), 0.0);
    }

    #[test]
    fn normalized_for_reference_amplitudes() {
        let l = ladder();
        for psi in [0.0, 0.1, 1.0, 5.0, 10.0] {
            let s = coherent_coefficients(Complex64::new(psi, 0.0), &l).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12, "psi = {psi}");
        }
    }

    /// `|c_n|^2` in exact rationals from the same `f` values.
    fn exact_squares(l: &LadderSpectrum, psi: i64) -> Vec<BigRational> {
        let psi2 = BigRational::from_integer(BigInt::from(psi * psi));
        let mut terms = Vec::new();
        let mut factorial = BigRational::one();
        let mut power = BigRational::one();
        for n in 0..=l.xi() {
            if n > 0 {
                factorial *= BigRational::from_float(l.f(n)).unwrap();
                power *= psi2.clone();
            }
            terms.push(power.clone() / factorial.clone());
        }
        let total = terms.iter().fold(BigRational::zero(), |acc, t| acc + t);
        terms.into_iter().map(|t| t / total.clone()).collect()
    }

    fn ln_rational(x: &BigRational) -> f64 {
        // split off powers of two so the ratio fits a double
        let shift = x.numer().bits() as i64 - x.denom().bits() as i64;
        let scaled = if shift >= 0 {
            x / BigRational::from_integer(BigInt::one() << shift as usize)
        } else {
            x * BigRational::from_integer(BigInt::one() << (-shift) as usize)
        };
        scaled.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }

    #[test]
    fn log_space_matches_exact_oracle_at_five() {
        let l = ladder();
        let s = coherent_coefficients(Complex64::new(5.0, 0.0), &l).unwrap();
        for (n, exact) in exact_squares(&l, 5).iter().enumerate() {
            let ln_exact = 0.5 * ln_rational(exact);
            let ln_got = s.ln_magnitudes()[n];
            // relative agreement of magnitudes: |exp(d) - 1| ~ |d|
            assert!(
                (ln_got - ln_exact).abs() < 1e-10,
                "n = {n}: {ln_got} vs {ln_exact}"
            );
        }
    }

    #[test]
    fn residual_matches_analytic_value() {
        let l = ladder();
        for psi in [
            Complex64::new(0.1, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(5.0, 0.0),
            Complex64::new(10.0, 0.0),
            Complex64::from_polar(3.0, 0.7),
        ] {
            let s = coherent_coefficients(psi, &l).unwrap();
            let direct = bg_residual(&s);
            let analytic = bg_residual_analytic(&s);
            assert!(
                (direct - analytic).abs() <= 1e-10 * analytic,
                "psi = {psi}: {direct} vs {analytic}"
            );
        }
    }

    #[test]
    fn residual_matches_plain_vector_arithmetic_for_large_amplitudes() {
        // once |Psi| is large the last coefficient dominates and the float
        // difference B-c - Psi c is no longer swamped by rounding
        let l = ladder();
        for psi in [12.0, 15.0, 20.0] {
            let s = coherent_coefficients(Complex64::new(psi, 0.0), &l).unwrap();
            let lowered = l.lower(s.coefficients());
            let naive: f64 = lowered
                .iter()
                .zip(s.coefficients())
                .map(|(b, c)| (b - c * psi).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let analytic = bg_residual_analytic(&s);
            assert!(
                (naive - analytic).abs() <= 1e-6 * analytic,
                "psi = {psi}: {naive} vs {analytic}"
            );
        }
    }

    #[test]
    fn residual_is_tiny_for_small_amplitude() {
        let s = coherent_coefficients(Complex64::new(0.1, 0.0), &ladder()).unwrap();
        assert!(bg_residual(&s) < 1e-40);
        assert!(ln_bg_residual_analytic(&s) < (1e-40f64).ln());
    }

    #[test]
    fn approximate_eigenstate_of_lowering() {
        let l = ladder();
        let psi = Complex64::new(2.0, 1.0);
        let s = coherent_coefficients(psi, &l).unwrap();
        assert!((s.lowering_expectation() - psi).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn normalization_holds(re in -10.0f64..10.0, im in -10.0f64..10.0) {
            let s = coherent_coefficients(Complex64::new(re, im), &ladder()).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn residual_identity(r in 0.05f64..10.0, theta in -3.1f64..3.1) {
            let s = coherent_coefficients(Complex64::from_polar(r, theta), &ladder()).unwrap();
            let direct = bg_residual(&s);
            let analytic = bg_residual_analytic(&s);
            prop_assert!((direct - analytic).abs() <= 1e-10 * analytic);
        }
    }
}
