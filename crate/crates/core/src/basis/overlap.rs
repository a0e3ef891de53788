use num_complex::Complex64;
use rayon::prelude::*;

use super::{Expansion, MorseSystem};
use crate::error::{MorseError, Result};
use crate::quadrature::{CompositeRule, QuadratureConfig};

/// 1D quadrature matrices between modes on one axis, each `dim x dim`,
/// row-major, zero for modes that were not requested.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisMatrices {
    pub dim: usize,
    /// `<phi_n | phi_n'>`
    pub overlap: Vec<f64>,
    /// `<phi_n | s | phi_n'>`
    pub position: Vec<f64>,
    /// `<phi_n | s^2 | phi_n'>`
    pub position_sq: Vec<f64>,
    /// `<phi_n | d/ds phi_n'>`
    pub gradient: Vec<f64>,
    /// `<d/ds phi_n | d/ds phi_n'>`
    pub gradient_sq: Vec<f64>,
    /// `<phi_n | d^2/ds^2 phi_n'>`
    pub laplacian: Vec<f64>,
}

impl AxisMatrices {
    fn build(system: &MorseSystem, modes: &[u32], rule: &CompositeRule) -> Result<Self> {
        let dim = system.k() as usize + 1;
        let samples: Vec<(usize, Vec<super::ModeSample>)> = modes
            .par_iter()
            .map(|&n| {
                let mode = system.mode(n)?;
                Ok((
                    n as usize,
                    rule.nodes.iter().map(|&x| mode.sample(x)).collect(),
                ))
            })
            .collect::<Result<_>>()?;
        let mut out = Self {
            dim,
            overlap: vec![0.0; dim * dim],
            position: vec![0.0; dim * dim],
            position_sq: vec![0.0; dim * dim],
            gradient: vec![0.0; dim * dim],
            gradient_sq: vec![0.0; dim * dim],
            laplacian: vec![0.0; dim * dim],
        };
        for (a, sa) in &samples {
            for (b, sb) in &samples {
                let idx = a * dim + b;
                let (mut s, mut x1, mut x2, mut g, mut gg, mut l) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
                for ((&w, &x), (pa, pb)) in
                    rule.weights.iter().zip(&rule.nodes).zip(sa.iter().zip(sb))
                {
                    let vv = w * pa.value * pb.value;
                    s += vv;
                    x1 += vv * x;
                    x2 += vv * x * x;
                    g += w * pa.value * pb.first;
                    gg += w * pa.first * pb.first;
                    l += w * pa.value * pb.second;
                }
                out.overlap[idx] = s;
                out.position[idx] = x1;
                out.position_sq[idx] = x2;
                out.gradient[idx] = g;
                out.gradient_sq[idx] = gg;
                out.laplacian[idx] = l;
            }
        }
        Ok(out)
    }
}

/// Tensor-product composite Gauss–Legendre rule over a square box covering
/// the requested modes, with the same nodes on both axes.
///
/// A 2D sum `sum_ij w_i w_j f(x_i, y_j)` of a separable expansion factorizes
/// into 1D mode matrices, which is how it is evaluated here.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorQuadrature {
    config: QuadratureConfig,
    bounds: (f64, f64),
    matrices: AxisMatrices,
}

impl TensorQuadrature {
    pub fn new(system: &MorseSystem, modes: &[u32], config: &QuadratureConfig) -> Result<Self> {
        config.validate()?;
        let bounds = system.support_of(modes, config.truncation)?;
        let mut core_end = bounds.0;
        for &n in modes {
            core_end = core_end.max(system.mode(n)?.turning_points().1);
        }
        let rule =
            CompositeRule::on_edges(&graded_edges(bounds, core_end, config.panels), config.order);
        let matrices = AxisMatrices::build(system, modes, &rule)?;
        Ok(Self {
            config: *config,
            bounds,
            matrices,
        })
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.config
    }

    /// Integration interval used on both axes.
    pub fn bounds(&self) -> (f64, f64) {
        self.bounds
    }

    pub fn matrices(&self) -> &AxisMatrices {
        &self.matrices
    }

    /// `sum conj(A[n][m]) B[n'][m'] opx[n][n'] opy[m][m']`.
    pub fn bilinear(&self, a: &Expansion, b: &Expansion, opx: &[f64], opy: &[f64]) -> Complex64 {
        let dim = self.matrices.dim;
        // u = opx B
        let mut u = vec![Complex64::new(0.0, 0.0); dim * dim];
        for n in 0..dim {
            for np in 0..dim {
                let o = opx[n * dim + np];
                if o == 0.0 {
                    continue;
                }
                for mp in 0..dim {
                    u[n * dim + mp] += o * b.at(np, mp);
                }
            }
        }
        // t = conj(A) opy
        let mut total = Complex64::new(0.0, 0.0);
        for n in 0..dim {
            for mp in 0..dim {
                let mut t = Complex64::new(0.0, 0.0);
                for m in 0..dim {
                    let o = opy[m * dim + mp];
                    if o != 0.0 {
                        t += a.at(n, m).conj() * o;
                    }
                }
                total += t * u[n * dim + mp];
            }
        }
        total
    }

    pub fn overlap(&self, a: &Expansion, b: &Expansion) -> Complex64 {
        self.bilinear(a, b, &self.matrices.overlap, &self.matrices.overlap)
    }
}

/// Panel edges over `bounds`: equal widths up to `core_end` (past the last
/// outer turning point the modes stop oscillating), then widths doubling
/// through the exponential tail. Roughly a third of the panels go to the tail.
fn graded_edges(bounds: (f64, f64), core_end: f64, panels: usize) -> Vec<f64> {
    let (lo, hi) = bounds;
    let core_end = core_end.clamp(lo, hi);
    let tail_panels = if hi - core_end > 1e-12 * (hi - lo) {
        (panels / 3).max(1).min(panels - 1)
    } else {
        0
    };
    let core_panels = panels - tail_panels;
    let core_end = if tail_panels == 0 { hi } else { core_end };
    let mut edges: Vec<f64> = (0..=core_panels)
        .map(|i| lo + (core_end - lo) * i as f64 / core_panels as f64)
        .collect();
    if tail_panels > 0 {
        let core_width = (core_end - lo) / core_panels as f64;
        let tail = hi - core_end;
        // widths w r^i summing to the tail, with w no wider than a core panel
        let mut ratio = 1.0_f64;
        let total = |r: f64| (0..tail_panels).map(|i| r.powi(i as i32)).sum::<f64>();
        while core_width * total(ratio) < tail && ratio < 2.0 {
            ratio += 0.01;
        }
        let first = tail / total(ratio);
        let mut x = core_end;
        for i in 0..tail_panels {
            x += first * ratio.powi(i as i32);
            edges.push(x);
        }
        *edges.last_mut().expect("tail panels were pushed") = hi;
    }
    edges
}

/// Runs `compute` on `config` and on its refinement; fails when they differ
/// by more than the refinement tolerance, returns the refined result otherwise.
pub(crate) fn with_refinement<T>(
    config: &QuadratureConfig,
    compute: impl Fn(&QuadratureConfig) -> Result<T>,
    difference: impl Fn(&T, &T) -> f64,
) -> Result<T> {
    let coarse = compute(config)?;
    let fine = compute(&config.refined())?;
    let diff = difference(&coarse, &fine);
    if !(diff <= config.refinement_tolerance) {
        return Err(MorseError::Accuracy {
            difference: diff,
            limit: config.refinement_tolerance,
        });
    }
    Ok(fine)
}

fn union_modes(states: &[&Expansion]) -> Vec<u32> {
    let mut modes: Vec<u32> = states.iter().flat_map(|e| e.modes()).collect();
    modes.sort_unstable();
    modes.dedup();
    modes
}

/// `<a|b>` by tensor-product quadrature, checked against a refined rule.
pub fn overlap(
    system: &MorseSystem,
    a: &Expansion,
    b: &Expansion,
    config: &QuadratureConfig,
) -> Result<Complex64> {
    let modes = union_modes(&[a, b]);
    with_refinement(
        config,
        |cfg| Ok(TensorQuadrature::new(system, &modes, cfg)?.overlap(a, b)),
        |x, y| (x - y).norm(),
    )
}

/// Matrix of `<s_i|s_j>` over a list of states.
pub fn gram_matrix(
    system: &MorseSystem,
    states: &[Expansion],
    config: &QuadratureConfig,
) -> Result<Vec<Vec<Complex64>>> {
    let refs: Vec<&Expansion> = states.iter().collect();
    let modes = union_modes(&refs);
    with_refinement(
        config,
        |cfg| {
            let quad = TensorQuadrature::new(system, &modes, cfg)?;
            Ok(states
                .par_iter()
                .map(|a| states.iter().map(|b| quad.overlap(a, b)).collect())
                .collect::<Vec<Vec<Complex64>>>())
        },
        |x, y| {
            x.iter()
                .flatten()
                .zip(y.iter().flatten())
                .map(|(p, q)| (p - q).norm())
                .fold(0.0, f64::max)
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{MixingCoefficients, MuBasis};
    use crate::params::{decompose, RationalityMode};
    use crate::spectrum::order_spectrum;

    fn three_pi() -> (MorseSystem, MuBasis) {
        let param = decompose("3pi", RationalityMode::Irrational).unwrap();
        let spectrum = order_spectrum(&param).unwrap();
        (
            MorseSystem::new(param, 1.0).unwrap(),
            MuBasis::new(spectrum, MixingCoefficients::symmetric()).unwrap(),
        )
    }

    #[test]
    fn product_states_normalized_and_orthogonal() {
        let (system, _) = three_pi();
        let config = QuadratureConfig::default();
        let a = Expansion::product(9, 3, 5);
        let b = Expansion::product(9, 5, 3);
        assert!((overlap(&system, &a, &a, &config).unwrap().re - 1.0).abs() < 1e-8);
        assert!(overlap(&system, &a, &b, &config).unwrap().norm() < 1e-8);
        let g = Expansion::product(9, 0, 0);
        let e = Expansion::product(9, 1, 0);
        assert!((overlap(&system, &g, &g, &config).unwrap().re - 1.0).abs() < 1e-8);
        assert!(overlap(&system, &g, &e, &config).unwrap().norm() < 1e-8);
    }

    #[test]
    fn mu_states_orthonormal() {
        let (system, basis) = three_pi();
        let config = QuadratureConfig::default();
        let states: Vec<Expansion> = [0, 1, 18, 40, 54]
            .iter()
            .map(|&i| basis.state(i).unwrap().expansion(9))
            .collect();
        let gram = gram_matrix(&system, &states, &config).unwrap();
        for (i, row) in gram.iter().enumerate() {
            for (j, value) in row.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((value - expected).norm() < 1e-8, "({i},{j}) = {value}");
            }
        }
    }

    #[test]
    fn coarse_rule_is_flagged() {
        let (system, basis) = three_pi();
        let coarse = QuadratureConfig {
            panels: 1,
            order: 4,
            ..Default::default()
        };
        let s = basis.state(40).unwrap().expansion(9);
        assert!(matches!(
            overlap(&system, &s, &s, &coarse),
            Err(MorseError::Accuracy { .. })
        ));
    }

    #[test]
    fn graded_edges_cover_bounds() {
        let edges = graded_edges((-1.5, 44.5), 7.0, 10);
        assert_eq!(edges.len(), 11);
        assert_eq!(edges[0], -1.5);
        assert_eq!(edges[10], 44.5);
        assert!(edges.windows(2).all(|w| w[1] > w[0]));
        assert!((edges[7] - 7.0).abs() < 1e-12);
        assert_eq!(graded_edges((0.0, 10.0), 2.0, 1), vec![0.0, 10.0]);
        let flat = graded_edges((0.0, 1.0), 1.0, 4);
        assert_eq!(flat, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
