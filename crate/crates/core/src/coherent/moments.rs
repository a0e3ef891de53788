use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{coherent_coefficients, ladder_f, CoherentState, LadderSpectrum};
use crate::basis::{Expansion, MixingCoefficients, MorseSystem, MuBasis, TensorQuadrature};
use crate::error::{MorseError, Result};
use crate::quadrature::QuadratureConfig;

/// Coordinate whose moments are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
        })
    }
}

/// First and second moments of position and momentum along one axis, in
/// units with `hbar = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mode: Axis,
    pub mean_q: f64,
    pub mean_q2: f64,
    pub mean_p: f64,
    pub mean_p2: f64,
    pub var_q: f64,
    pub var_p: f64,
    pub dq: f64,
    pub dp: f64,
    /// Variance product `(dQ)^2 (dP)^2`, bounded below by `1/4`.
    pub product: f64,
    /// `<P^2>` again, as `-<psi|d^2 psi>`.
    pub mean_p2_laplacian: f64,
}

impl MomentReport {
    fn from_moments(
        mode: Axis,
        mean_q: f64,
        mean_q2: f64,
        mean_p: f64,
        mean_p2: f64,
        mean_p2_laplacian: f64,
    ) -> Self {
        let var_q = (mean_q2 - mean_q * mean_q).max(0.0);
        let var_p = (mean_p2 - mean_p * mean_p).max(0.0);
        Self {
            mode,
            mean_q,
            mean_q2,
            mean_p,
            mean_p2,
            var_q,
            var_p,
            dq: var_q.sqrt(),
            dp: var_p.sqrt(),
            product: var_q * var_p,
            mean_p2_laplacian,
        }
    }

    /// Standard-deviation product `dQ dP`.
    pub fn sigma_product(&self) -> f64 {
        self.dq * self.dp
    }

    fn largest_change(&self, other: &Self) -> f64 {
        [
            (self.mean_q, other.mean_q),
            (self.mean_q2, other.mean_q2),
            (self.mean_p, other.mean_p),
            (self.mean_p2, other.mean_p2),
            (self.var_q, other.var_q),
            (self.var_p, other.var_p),
        ]
        .iter()
        .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
        .fold(0.0, f64::max)
    }
}

/// A quadrature and its refinement over a fixed set of modes; every moment
/// is evaluated on both and rejected if they disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEngine {
    coarse: TensorQuadrature,
    fine: TensorQuadrature,
    tolerance: f64,
}

impl MomentEngine {
    pub fn new(system: &MorseSystem, modes: &[u32], config: &QuadratureConfig) -> Result<Self> {
        Ok(Self {
            coarse: TensorQuadrature::new(system, modes, config)?,
            fine: TensorQuadrature::new(system, modes, &config.refined())?,
            tolerance: config.refinement_tolerance,
        })
    }

    /// Moments divided by the quadrature norm, and that norm.
    fn report_on(quad: &TensorQuadrature, state: &Expansion, axis: Axis) -> (MomentReport, f64) {
        let m = quad.matrices();
        let along = |op: &[f64]| match axis {
            Axis::X => quad.bilinear(state, state, op, &m.overlap),
            Axis::Y => quad.bilinear(state, state, &m.overlap, op),
        };
        let norm = quad.overlap(state, state).re;
        // <P> = -i <psi|d psi>
        let gradient: Complex64 = along(&m.gradient);
        let report = MomentReport::from_moments(
            axis,
            along(&m.position).re / norm,
            along(&m.position_sq).re / norm,
            gradient.im / norm,
            along(&m.gradient_sq).re / norm,
            -along(&m.laplacian).re / norm,
        );
        (report, norm)
    }

    pub fn report(&self, state: &Expansion, axis: Axis) -> Result<MomentReport> {
        let (coarse, coarse_norm) = Self::report_on(&self.coarse, state, axis);
        let (fine, fine_norm) = Self::report_on(&self.fine, state, axis);
        let change = coarse
            .largest_change(&fine)
            .max((coarse_norm - fine_norm).abs() / fine_norm.abs().max(1.0));
        if !(change <= self.tolerance) {
            return Err(MorseError::Accuracy {
                difference: change,
                limit: self.tolerance,
            });
        }
        Ok(fine)
    }
}

/// Moments of `state` along `axis`, with the refinement check of `config`.
pub fn moments(
    system: &MorseSystem,
    state: &Expansion,
    axis: Axis,
    config: &QuadratureConfig,
) -> Result<MomentReport> {
    MomentEngine::new(system, &state.modes(), config)?.report(state, axis)
}

/// Everything needed to turn a coherence amplitude into moment reports for
/// one well and one choice of mixing coefficients.
#[derive(Debug, Clone)]
pub struct UncertaintyContext {
    system: MorseSystem,
    basis: MuBasis,
    ladder: LadderSpectrum,
    engine: MomentEngine,
}

impl UncertaintyContext {
    pub fn new(system: MorseSystem, basis: MuBasis, config: &QuadratureConfig) -> Result<Self> {
        if system.parameter() != basis.spectrum().parameter() {
            return Err(MorseError::Inconsistent(
                "basis and system were built for different parameters".into(),
            ));
        }
        let ladder = ladder_f(basis.spectrum())?;
        let modes: Vec<u32> = (0..=system.k()).collect();
        let engine = MomentEngine::new(&system, &modes, config)?;
        Ok(Self {
            system,
            basis,
            ladder,
            engine,
        })
    }

    /// Same well and quadrature with one shared pair on every doublet.
    pub fn with_mixing(&self, mixing: MixingCoefficients) -> Result<Self> {
        Ok(Self {
            basis: MuBasis::new(self.basis.spectrum().clone(), mixing)?,
            ..self.clone()
        })
    }

    pub fn system(&self) -> &MorseSystem {
        &self.system
    }

    pub fn basis(&self) -> &MuBasis {
        &self.basis
    }

    pub fn ladder(&self) -> &LadderSpectrum {
        &self.ladder
    }

    pub fn engine(&self) -> &MomentEngine {
        &self.engine
    }

    pub fn coherent(&self, psi: Complex64) -> Result<CoherentState> {
        coherent_coefficients(psi, &self.ladder)
    }

    pub fn coherent_expansion(&self, psi: Complex64) -> Result<Expansion> {
        self.coherent(psi)?.expansion(&self.basis)
    }

    /// `(x report, y report)` for the coherent state of amplitude `psi`.
    pub fn reports(&self, psi: Complex64) -> Result<(MomentReport, MomentReport)> {
        let state = self.coherent_expansion(psi)?;
        Ok((
            self.engine.report(&state, Axis::X)?,
            self.engine.report(&state, Axis::Y)?,
        ))
    }
}

/// One line of an uncertainty sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub psi: f64,
    pub mode: Axis,
    pub var_q: f64,
    pub var_p: f64,
    pub product: f64,
}

impl SweepRow {
    fn of(psi: f64, report: &MomentReport) -> Self {
        Self {
            psi,
            mode: report.mode,
            var_q: report.var_q,
            var_p: report.var_p,
            product: report.product,
        }
    }
}

/// `0.1, 0.2, ..., 5.0`.
pub fn default_sweep_values() -> Vec<f64> {
    (1..=50).map(|i| f64::from(i) / 10.0).collect()
}

/// x and y rows for every real amplitude, in input order.
pub fn uncertainty_sweep(
    context: &UncertaintyContext,
    psi_values: &[f64],
) -> Result<Vec<SweepRow>> {
    let pairs = psi_values
        .par_iter()
        .map(|&psi| {
            let (x, y) = context.reports(Complex64::new(psi, 0.0))?;
            Ok([SweepRow::of(psi, &x), SweepRow::of(psi, &y)])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairs.into_iter().flatten().collect())
}

/// First amplitude where the x and y products differ by more than
/// `relative` of their mean.
pub fn first_separation(rows: &[SweepRow], relative: f64) -> Option<f64> {
    rows.chunks(2).find_map(|pair| match pair {
        [x, y] => {
            let mean = 0.5 * (x.product + y.product);
            ((x.product - y.product).abs() > relative * mean).then_some(x.psi)
        }
        _ => None,
    })
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["psi", "mode", "var_q", "var_p", "product"])?;
    for row in rows {
        writer.write_record([
            format!("{}", row.psi),
            row.mode.to_string(),
            format!("{:.12e}", row.var_q),
            format!("{:.12e}", row.var_p),
            format!("{:.12e}", row.product),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
