#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use morsekit::MorseError;

use crate::commands::Selector;
use crate::config::{parse_complex, parse_psi_values, FlagValues, RunConfig};

/// Spectra, densities and coherent states of the two-dimensional Morse oscillator.
///
/// Settings come from flags first, then the `--config` TOML file, then
/// built-in defaults. MORSEKIT_THREADS caps the worker pool.
#[derive(Parser, Debug)]
#[command(name = "morsekit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Principal parameter as exact decimal text, or a multiple of pi such as 3pi
    #[arg(long)]
    p: Option<String>,
    /// integer | irrational | rational R/Q
    #[arg(long, num_args = 1..=2)]
    mode: Option<Vec<String>>,
    /// Range constant beta of the potential
    #[arg(long)]
    beta: Option<f64>,
    /// Doublet weight on |n,m> (n > m): "re,im" or "mag@phase"
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Doublet weight on |m,n>: "re,im" or "mag@phase"
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    /// Density grid size, NXxNY
    #[arg(long)]
    grid: Option<String>,
    /// Density x interval LO:HI (default: scanned support)
    #[arg(long, allow_hyphen_values = true)]
    xrange: Option<String>,
    /// Density y interval LO:HI (default: scanned support)
    #[arg(long, allow_hyphen_values = true)]
    yrange: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of csv,json,pgm
    #[arg(long)]
    format: Option<String>,
    /// Quadrature panels per axis
    #[arg(long)]
    panels: Option<usize>,
    /// Gauss-Legendre nodes per panel
    #[arg(long)]
    order: Option<usize>,
    /// TOML file with any of the settings above
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn flags(&self) -> FlagValues {
        FlagValues {
            p: self.p.clone(),
            mode: self.mode.as_ref().map(|parts| parts.join(" ")),
            beta: self.beta,
            gamma: self.gamma.clone(),
            delta: self.delta.clone(),
            grid: self.grid.clone(),
            xrange: self.xrange.clone(),
            yrange: self.yrange.clone(),
            out: self.out.clone(),
            format: self.format.clone(),
            panels: self.panels,
            order: self.order,
            config: self.config.clone(),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ordered spectrum with level keys and multiplicities
    Spectrum(#[command(flatten)] Common),
    /// Degeneracy census and the list of accidental levels
    Degeneracy(#[command(flatten)] Common),
    /// Probability density of a single-index state or a coherent state
    Density {
        #[command(flatten)]
        common: Common,
        /// Index of the single-index state
        #[arg(long, conflicts_with = "psi", required_unless_present = "psi")]
        mu: Option<usize>,
        /// Coherence amplitude: "re,im", "mag@phase" or a real number
        #[arg(long, allow_hyphen_values = true)]
        psi: Option<String>,
    },
    /// Position/momentum variance products over a sweep of real amplitudes
    Uncertainty {
        #[command(flatten)]
        common: Common,
        /// START:STEP:STOP or a comma list
        #[arg(long, default_value = "0.1:0.1:5.0")]
        psi: String,
    },
    /// Coefficients and ladder residual of one coherent state
    Coherent {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        psi: String,
    },
}

fn exit_code(error: &MorseError) -> u8 {
    match error {
        MorseError::OrderingAmbiguity { .. } => 3,
        MorseError::Accuracy { .. } => 4,
        MorseError::Io(_) => 1,
        _ => 2,
    }
}

fn configure_threads() -> Result<(), MorseError> {
    if let Ok(text) = std::env::var("MORSEKIT_THREADS") {
        let threads: usize = text.trim().parse().map_err(|_| {
            MorseError::Parse(format!(
                "MORSEKIT_THREADS must be a positive integer, got {text:?}"
            ))
        })?;
        if threads == 0 {
            return Err(MorseError::Parse(
                "MORSEKIT_THREADS must be at least 1".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| MorseError::Domain(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), MorseError> {
    configure_threads()?;
    match cli.command {
        Command::Spectrum(common) => commands::spectrum(&RunConfig::resolve(&common.flags())?),
        Command::Degeneracy(common) => commands::degeneracy(&RunConfig::resolve(&common.flags())?),
        Command::Density { common, mu, psi } => {
            let run = RunConfig::resolve(&common.flags())?;
            let selector = match (mu, psi) {
                (Some(index), _) => Selector::Mu(index),
                (None, Some(text)) => Selector::Coherent(parse_complex(&text)?),
                (None, None) => {
                    return Err(MorseError::Parse("density needs --mu or --psi".into()))
                }
            };
            commands::density(&run, selector)
        }
        Command::Uncertainty { common, psi } => commands::uncertainty(
            &RunConfig::resolve(&common.flags())?,
            &parse_psi_values(&psi)?,
        ),
        Command::Coherent { common, psi } => {
            commands::coherent(&RunConfig::resolve(&common.flags())?, parse_complex(&psi)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(exit_code(&error))
        }
    }
}
