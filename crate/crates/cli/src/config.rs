//! Run settings: flag and config-file parsing, merged as flags > file > defaults.

use std::path::{Path, PathBuf};

use morsekit::basis::{GridSpec, MixingCoefficients};
use morsekit::params::{PrincipalParameter, RationalityMode};
use morsekit::quadrature::QuadratureConfig;
use morsekit::{MorseError, Result};
use num_complex::Complex64;
use serde::Deserialize;

/// Output files a command may write.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Pgm,
}

pub fn parse_formats(text: &str) -> Result<Vec<Format>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let format = match part.to_ascii_lowercase().as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            "pgm" => Format::Pgm,
            other => {
                return Err(MorseError::Parse(format!(
                    "unknown output format {other:?}"
                )))
            }
        };
        if !out.contains(&format) {
            out.push(format);
        }
    }
    if out.is_empty() {
        return Err(MorseError::Parse("empty format list".into()));
    }
    Ok(out)
}

/// `integer`, `irrational`, `rational R/Q`, `rational:R/Q` or `rational=R/Q`.
pub fn parse_mode(text: &str) -> Result<RationalityMode> {
    let text = text.trim();
    let lower = text.to_ascii_lowercase();
    match lower.as_str() {
        "integer" => return Ok(RationalityMode::Integer),
        "irrational" => return Ok(RationalityMode::Irrational),
        _ => {}
    }
    let Some(rest) = lower.strip_prefix("rational") else {
        return Err(MorseError::Parse(format!(
            "mode must be integer, irrational or rational R/Q, got {text:?}"
        )));
    };
    let fraction = rest.trim_start_matches([' ', ':', '=']).trim();
    let (r, q) = fraction
        .split_once('/')
        .ok_or_else(|| MorseError::Parse(format!("rational mode needs R/Q, got {text:?}")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| MorseError::Parse(format!("bad integer {s:?} in mode {text:?}")))
    };
    Ok(RationalityMode::Rational {
        r: parse(r)?,
        q: parse(q)?,
    })
}

/// `re,im`, a bare real, or `mag@phase` with the phase in radians.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let bad = || MorseError::Parse(format!("cannot read complex number {text:?}"));
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let text = text.trim();
    let value = if let Some((mag, phase)) = text.split_once('@') {
        Complex64::from_polar(number(mag)?, number(phase)?)
    } else if let Some((re, im)) = text.split_once(',') {
        Complex64::new(number(re)?, number(im)?)
    } else {
        Complex64::new(number(text)?, 0.0)
    };
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(bad());
    }
    Ok(value)
}

/// `NXxNY`, e.g. `400x400`.
pub fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let bad = || MorseError::Parse(format!("grid must look like 400x400, got {text:?}"));
    let (nx, ny) = text
        .trim()
        .to_ascii_lowercase()
        .split_once('x')
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .ok_or_else(bad)?;
    let nx = nx.trim().parse().map_err(|_| bad())?;
    let ny = ny.trim().parse().map_err(|_| bad())?;
    Ok((nx, ny))
}

/// `LO:HI` or `LO,HI`.
pub fn parse_range(text: &str) -> Result<(f64, f64)> {
    let bad = || MorseError::Parse(format!("range must look like -2:8, got {text:?}"));
    let (lo, hi) = text
        .split_once(':')
        .or_else(|| text.split_once(','))
        .ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) {
        return Err(MorseError::Parse(format!(
            "range {text:?} must be increasing"
        )));
    }
    Ok((lo, hi))
}

/// `START:STEP:STOP` (inclusive, rounded to the step) or a comma list.
pub fn parse_psi_values(text: &str) -> Result<Vec<f64>> {
    let bad = || {
        MorseError::Parse(format!(
            "amplitudes must look like 0.1:0.1:5 or 0,1,5, got {text:?}"
        ))
    };
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let step: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[2].trim().parse().map_err(|_| bad())?;
        if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        // values computed from the index so no step error accumulates
        return Ok((0..=count)
            .map(|i| start + step * i as f64)
            .map(|v| (v * 1e12).round() / 1e12)
            .collect());
    }
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}

/// Settings read from a TOML file; every key is optional.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub p: Option<String>,
    pub mode: Option<String>,
    pub beta: Option<f64>,
    pub gamma: Option<String>,
    pub delta: Option<String>,
    pub grid: Option<String>,
    pub xrange: Option<String>,
    pub yrange: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub panels: Option<usize>,
    pub order: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MorseError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| MorseError::Parse(format!("{}: {e}", path.display())))
    }
}

/// Raw flag values shared by every subcommand.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlagValues {
    pub p: Option<String>,
    pub mode: Option<String>,
    pub beta: Option<f64>,
    pub gamma: Option<String>,
    pub delta: Option<String>,
    pub grid: Option<String>,
    pub xrange: Option<String>,
    pub yrange: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub panels: Option<usize>,
    pub order: Option<usize>,
    pub config: Option<PathBuf>,
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub parameter: PrincipalParameter,
    pub beta: f64,
    pub mixing: MixingCoefficients,
    pub grid: (usize, usize),
    pub xrange: Option<(f64, f64)>,
    pub yrange: Option<(f64, f64)>,
    pub out: PathBuf,
    pub formats: Option<Vec<Format>>,
    pub quadrature: QuadratureConfig,
}

impl RunConfig {
    pub fn resolve(flags: &FlagValues) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>) -> Option<T> {
            flag.clone().or_else(|| file.clone())
        }

        let p_text =
            pick(&flags.p, &file.p).ok_or_else(|| MorseError::Parse("--p is required".into()))?;
        let mode = pick(&flags.mode, &file.mode)
            .ok_or_else(|| MorseError::Parse("--mode is required".into()))?;
        let parameter = PrincipalParameter::new(&p_text, parse_mode(&mode)?)?;

        let beta = pick(&flags.beta, &file.beta).unwrap_or(1.0);
        let gamma = pick(&flags.gamma, &file.gamma)
            .map(|s| parse_complex(&s))
            .transpose()?;
        let delta = pick(&flags.delta, &file.delta)
            .map(|s| parse_complex(&s))
            .transpose()?;
        let mixing = match (gamma, delta) {
            (None, None) => MixingCoefficients::symmetric(),
            (g, d) => {
                let zero = Complex64::new(0.0, 0.0);
                MixingCoefficients::normalized(g.unwrap_or(zero), d.unwrap_or(zero))?
            }
        };

        let grid = match pick(&flags.grid, &file.grid) {
            Some(text) => parse_grid(&text)?,
            None => (400, 400),
        };
        let xrange = pick(&flags.xrange, &file.xrange)
            .map(|s| parse_range(&s))
            .transpose()?;
        let yrange = pick(&flags.yrange, &file.yrange)
            .map(|s| parse_range(&s))
            .transpose()?;
        let formats = pick(&flags.format, &file.format)
            .map(|s| parse_formats(&s))
            .transpose()?;
        let defaults = QuadratureConfig::default();
        let quadrature = QuadratureConfig {
            panels: pick(&flags.panels, &file.panels).unwrap_or(defaults.panels),
            order: pick(&flags.order, &file.order).unwrap_or(defaults.order),
            ..defaults
        };
        quadrature.validate()?;

        Ok(Self {
            parameter,
            beta,
            mixing,
            grid,
            xrange,
            yrange,
            out: pick(&flags.out, &file.out).unwrap_or_else(|| PathBuf::from(".")),
            formats,
            quadrature,
        })
    }

    /// Requested formats, or `defaults` when none were given.
    pub fn formats_or(&self, defaults: &[Format]) -> Vec<Format> {
        self.formats.clone().unwrap_or_else(|| defaults.to_vec())
    }

    pub fn grid_spec(&self, covering: (f64, f64)) -> Result<GridSpec> {
        GridSpec::new(
            self.xrange.unwrap_or(covering),
            self.yrange.unwrap_or(covering),
            self.grid.0,
            self.grid.1,
        )
    }
}
