//! Nonlinear ladder on the single-index basis, its truncated coherent states
//! and their position/momentum uncertainties.

mod ladder;
mod moments;
mod state;

pub use ladder::{ladder_f, EnergyDifference, LadderFunction, LadderSpectrum};
pub use moments::{
    default_sweep_values, first_separation, moments, uncertainty_sweep, write_sweep_csv, Axis,
    MomentEngine, MomentReport, SweepRow, UncertaintyContext,
};
pub use state::{
    bg_residual, bg_residual_analytic, coherent_coefficients, ln_bg_residual_analytic,
    CoefficientEntry, CoherentDump, CoherentState,
};
