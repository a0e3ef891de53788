use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::levels::ExactLevel;
use super::{enumerate_levels, key_unchecked, Classification, LevelKey, LevelRecord, QuantumPair};
use crate::error::{MorseError, Result};
use crate::params::PrincipalParameter;

/// Float differences within this many ulps are re-decided exactly.
const ESCALATION_ULPS: f64 = 8.0;

/// Levels in strictly increasing energy; position `i` is the single index `mu_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedSpectrum {
    parameter: PrincipalParameter,
    levels: Vec<LevelRecord>,
}

impl OrderedSpectrum {
    pub fn parameter(&self) -> &PrincipalParameter {
        &self.parameter
    }

    pub fn levels(&self) -> &[LevelRecord] {
        &self.levels
    }

    /// Last single index.
    pub fn xi(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, index: usize) -> Option<&LevelRecord> {
        self.levels.get(index)
    }

    /// Single index of the level containing `pair`.
    pub fn index_of(&self, pair: QuantumPair) -> Option<usize> {
        self.levels.iter().position(|l| l.contains(pair))
    }

    pub fn shifted_energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.shifted_energy).collect()
    }

    /// True when every level is a singlet or a swap doublet.
    pub fn is_at_most_double(&self) -> bool {
        self.levels
            .iter()
            .all(|l| l.classification != Classification::Accidental)
    }
}

/// Sorts the levels of `param` by increasing shifted energy.
///
/// Rational and integer parameters are ordered by their exact integer energy.
/// Irrational parameters compare keys in floating point and fall back to the
/// exact decimal text of `p` when two energies are within a few ulps; an
/// exact tie between distinct keys is reported as
/// [`MorseError::OrderingAmbiguity`].
pub fn order_spectrum(param: &PrincipalParameter) -> Result<OrderedSpectrum> {
    let mut levels = enumerate_levels(param);
    if param.rational_parts().is_none() {
        let exact_eps = param.exact_epsilon();
        let epsilon = param.epsilon();
        let failure: RefCell<Option<MorseError>> = RefCell::new(None);
        levels.sort_by(
            |x, y| match compare_keys(x.key, y.key, epsilon, &exact_eps) {
                Some(ord) => ord,
                None => {
                    failure
                        .borrow_mut()
                        .get_or_insert(MorseError::OrderingAmbiguity {
                            first: (x.key.a, x.key.b),
                            second: (y.key.a, y.key.b),
                        });
                    Ordering::Equal
                }
            },
        );
        if let Some(err) = failure.into_inner() {
            return Err(err);
        }
        let k = u64::from(param.k());
        let expected = ((k + 1) * (k + 2) / 2) as usize;
        if levels.len() != expected {
            return Err(MorseError::Inconsistent(format!(
                "irrational spectrum has {} levels, expected {expected}",
                levels.len()
            )));
        }
    } else {
        levels.sort_by(|x, y| match (x.exact, y.exact) {
            (ExactLevel::Scaled(sx), ExactLevel::Scaled(sy)) => sy.cmp(&sx),
            _ => unreachable!("rational levels carry scaled values"),
        });
    }
    Ok(OrderedSpectrum {
        parameter: param.clone(),
        levels,
    })
}

/// Energy order of two keys: `Less` when `x` lies lower, i.e. when
/// `(a_x - a_y) + 2 eps (b_x - b_y) > 0`. `None` on an exact tie of distinct keys.
fn compare_keys(
    x: LevelKey,
    y: LevelKey,
    epsilon: f64,
    exact_eps: &BigRational,
) -> Option<Ordering> {
    if x == y {
        return Some(Ordering::Equal);
    }
    let da = x.a as f64 - y.a as f64;
    let db = x.b as f64 - y.b as f64;
    let diff = da + 2.0 * epsilon * db;
    let scale = da.abs() + (2.0 * epsilon * db).abs();
    if diff.abs() > ESCALATION_ULPS * f64::EPSILON * scale {
        return Some(if diff > 0.0 {
            Ordering::Less
        } else {
            Ordering::Greater
        });
    }
    let da = BigRational::from_integer(BigInt::from(x.a) - BigInt::from(y.a));
    let db = BigRational::from_integer(BigInt::from(x.b) - BigInt::from(y.b));
    let two = BigRational::from_integer(BigInt::from(2));
    let exact = da + two * exact_eps * db;
    if exact.is_zero() {
        None
    } else if exact.is_positive() {
        Some(Ordering::Less)
    } else {
        Some(Ordering::Greater)
    }
}

/// Two keys whose relative order changes within `tol` of the current `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NearCrossing {
    pub first: LevelKey,
    pub second: LevelKey,
    /// Remainder at which both keys have equal energy.
    pub crossing_epsilon: f64,
}

/// All pairs of distinct keys of a `k` spectrum that swap order within
/// `|delta eps| < tol`: `|(a_i - a_j) + 2 eps (b_i - b_j)| < 2 tol |b_i - b_j|`.
pub fn crossing_report(k: u32, epsilon: f64, tol: f64) -> Vec<NearCrossing> {
    let keys: Vec<LevelKey> = (0..=k)
        .flat_map(|n| (0..=n).map(move |m| key_unchecked(k, n, m)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut out = Vec::new();
    for (i, &first) in keys.iter().enumerate() {
        for &second in &keys[i + 1..] {
            let da = first.a as f64 - second.a as f64;
            let db = first.b as f64 - second.b as f64;
            if db == 0.0 {
                continue;
            }
            if (da + 2.0 * epsilon * db).abs() < 2.0 * tol * db.abs() {
                out.push(NearCrossing {
                    first,
                    second,
                    crossing_epsilon: -da / (2.0 * db),
                });
            }
        }
    }
    out
}
