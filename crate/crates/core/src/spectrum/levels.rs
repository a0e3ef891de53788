use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{key_unchecked, LevelKey, QuantumPair};
use crate::params::PrincipalParameter;

/// How the members of a level are related.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    /// A single diagonal state `|n, n>`.
    Singlet,
    /// Exactly `{|n, m>, |m, n>}` with `n != m`.
    Doublet,
    /// Anything else: the level mixes pairs not related by swapping indices.
    Accidental,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Singlet => "singlet",
            Classification::Doublet => "doublet",
            Classification::Accidental => "accidental",
        }
    }

    fn of(members: &[QuantumPair]) -> Self {
        match members {
            [single] if single.is_diagonal() => Classification::Singlet,
            [first, second] if !first.is_diagonal() && first.swapped() == *second => {
                Classification::Doublet
            }
            _ => Classification::Accidental,
        }
    }
}

/// Exact grouping value of a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum ExactLevel {
    /// Irrational `p`: the integer key itself.
    Key(LevelKey),
    /// Rational `p = k + r/q`: `q (a + 2 (r/q) b) = a q + 2 r b`.
    Scaled(u128),
}

/// One energy level: every bound pair sharing the same exact energy.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord {
    /// Key of the first listed member.
    pub key: LevelKey,
    /// Members, swap partners adjacent with the `n > m` element first.
    pub members: Vec<QuantumPair>,
    pub shifted_energy: f64,
    pub classification: Classification,
    pub(crate) exact: ExactLevel,
}

impl LevelRecord {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, pair: QuantumPair) -> bool {
        self.members.contains(&pair)
    }

    /// Number of unordered index pairs among the members.
    pub fn swap_reduced(&self) -> usize {
        self.members.iter().filter(|p| p.n >= p.m).count()
    }

    /// Scaled energy: shifted energy minus `2 eps^2`.
    pub fn scaled_energy(&self, epsilon: f64) -> f64 {
        self.shifted_energy - 2.0 * epsilon * epsilon
    }
}

/// Groups all `(k+1)^2` bound pairs into levels by exact energy equality.
///
/// Irrational parameters group by [`LevelKey`]; integer and rational ones by
/// the integer `a q + 2 r b`. Levels come back in ascending `(a, b)` order for
/// irrational `p` and ascending energy otherwise; use
/// [`order_spectrum`](super::order_spectrum) for the energy ordering in all
/// modes.
pub fn enumerate_levels(param: &PrincipalParameter) -> Vec<LevelRecord> {
    let k = param.k();
    let rational = param.rational_parts();
    let mut groups: BTreeMap<ExactLevel, Vec<QuantumPair>> = BTreeMap::new();
    for n in 0..=k {
        for m in 0..=k {
            let key = key_unchecked(k, n, m);
            let exact = match rational {
                None => ExactLevel::Key(key),
                Some((r, q)) => ExactLevel::Scaled(
                    u128::from(key.a) * u128::from(q) + 2 * u128::from(r) * u128::from(key.b),
                ),
            };
            groups
                .entry(exact)
                .or_default()
                .push(QuantumPair::new(n, m));
        }
    }

    let epsilon = param.epsilon();
    let build = |(exact, mut members): (ExactLevel, Vec<QuantumPair>)| {
        sort_members(&mut members);
        let key = key_unchecked(k, members[0].n, members[0].m);
        let shifted_energy = match (exact, rational) {
            (ExactLevel::Scaled(scaled), Some((_, q))) => -(scaled as f64) / q as f64,
            _ => key.shifted_energy(epsilon),
        };
        LevelRecord {
            key,
            classification: Classification::of(&members),
            members,
            shifted_energy,
            exact,
        }
    };

    match rational {
        // larger scaled value means lower energy
        Some(_) => groups.into_iter().rev().map(build).collect(),
        None => groups.into_iter().map(build).collect(),
    }
}

/// Swap partners adjacent, `n > m` first, larger indices first.
fn sort_members(members: &mut [QuantumPair]) {
    members.sort_by(|x, y| {
        let (xh, xl) = (x.n.max(x.m), x.n.min(x.m));
        let (yh, yl) = (y.n.max(y.m), y.n.min(y.m));
        yh.cmp(&xh)
            .then(yl.cmp(&xl))
            .then((y.n > y.m).cmp(&(x.n > x.m)))
    });
}

/// Census of a level list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSummary {
    /// Number of product states, `(k+1)^2` for a full enumeration.
    pub total_states: usize,
    /// Number of unordered index pairs, `(k+1)(k+2)/2`.
    pub swap_reduced: usize,
    /// Number of distinct energies.
    pub distinct: usize,
    /// Unordered pairs beyond one per level: `swap_reduced - distinct`.
    pub accidental: usize,
}

pub fn count_summary(levels: &[LevelRecord]) -> CountSummary {
    let total_states = levels.iter().map(LevelRecord::multiplicity).sum();
    let swap_reduced = levels.iter().map(LevelRecord::swap_reduced).sum::<usize>();
    let distinct = levels.len();
    CountSummary {
        total_states,
        swap_reduced,
        distinct,
        accidental: swap_reduced - distinct,
    }
}
