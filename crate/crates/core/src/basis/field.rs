use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Expansion, MorseSystem};
use crate::error::{MorseError, Result};

/// A rectangular sampling grid of `nx * ny` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        let spec = Self {
            x_min: x.0,
            x_max: x.1,
            y_min: y.0,
            y_max: y.1,
            nx,
            ny,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.x_min < self.x_max) || !(self.y_min < self.y_max) {
            return Err(MorseError::Domain(format!(
                "grid bounds must be finite and increasing: x [{}, {}], y [{}, {}]",
                self.x_min, self.x_max, self.y_min, self.y_max
            )));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(MorseError::Domain(format!(
                "grid needs at least 2 cells per axis, got {}x{}",
                self.nx, self.ny
            )));
        }
        Ok(())
    }

    /// Square box over the scanned support of every mode in `expansion`.
    pub fn covering(
        system: &MorseSystem,
        expansion: &Expansion,
        nx: usize,
        ny: usize,
        threshold: f64,
    ) -> Result<Self> {
        let bounds = system.support_of(&expansion.modes(), threshold)?;
        Self::new(bounds, bounds, nx, ny)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    /// Center of column `i` along x.
    pub fn x_at(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    /// Center of row `j` along y.
    pub fn y_at(&self, j: usize) -> f64 {
        self.y_min + (j as f64 + 0.5) * self.dy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Samples on a [`GridSpec`], stored with `y` varying fastest:
/// `values[i * ny + j]` is the cell at `(x_at(i), y_at(j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField2D {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarField2D {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.ny + j]
    }

    /// `sum values * cell area`.
    pub fn riemann_sum(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.cell_area()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// The field reflected across `y = x`.
    pub fn transpose(&self) -> Self {
        let GridSpec {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
        } = self.spec;
        let spec = GridSpec {
            x_min: y_min,
            x_max: y_max,
            y_min: x_min,
            y_max: x_max,
            nx: ny,
            ny: nx,
        };
        let mut values = vec![0.0; self.values.len()];
        for i in 0..nx {
            for j in 0..ny {
                values[j * nx + i] = self.get(i, j);
            }
        }
        Self { spec, values }
    }

    /// Share of cells whose value exceeds `relative` times the maximum.
    pub fn fraction_above(&self, relative: f64) -> f64 {
        let cut = relative * self.max();
        self.values.iter().filter(|&&v| v > cut).count() as f64 / self.values.len() as f64
    }

    pub fn has_non_finite(&self) -> bool {
        self.values.iter().any(|v| !v.is_finite())
    }

    /// `x,y,value` rows in storage order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["x", "y", "value"])?;
        for i in 0..self.spec.nx {
            let x = self.spec.x_at(i);
            for j in 0..self.spec.ny {
                writer.write_record([
                    format!("{x:.12e}"),
                    format!("{:.12e}", self.spec.y_at(j)),
                    format!("{:.12e}", self.get(i, j)),
                ])?;
            }
        }
        writer.flush()?;
        Ok(())
    }

    /// Plain (P2) graymap scaled so the maximum maps to 65535. Image rows run
    /// from high `y` at the top to low `y` at the bottom; columns follow `x`.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> Result<()> {
        let GridSpec { nx, ny, .. } = self.spec;
        let max = self.max();
        writeln!(out, "P2")?;
        writeln!(out, "{nx} {ny}")?;
        writeln!(out, "65535")?;
        for j in (0..ny).rev() {
            let row: Vec<String> = (0..nx)
                .map(|i| {
                    let level = if max > 0.0 {
                        (self.get(i, j) / max * 65535.0).round()
                    } else {
                        0.0
                    };
                    (level as u32).to_string()
                })
                .collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Sidecar describing where a density came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMetadata {
    pub p_text: String,
    pub mode: String,
    pub state: String,
    pub gamma: [f64; 2],
    pub delta: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub psi: Option<[f64; 2]>,
    pub grid: GridSpec,
    pub max: f64,
    pub riemann_sum: f64,
}

impl DensityMetadata {
    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }
}

/// `|psi(x_i, y_j)|^2` at every cell center.
///
/// Each row of constant `x` first folds the x-modes into per-`m` weights
/// `u_m = sum_n C[n][m] phi_n(x)`, then sums `u_m phi_m(y_j)` along the row.
pub fn density_grid(
    system: &MorseSystem,
    expansion: &Expansion,
    grid: &GridSpec,
) -> Result<ScalarField2D> {
    grid.validate()?;
    let x_modes = expansion.x_modes();
    let y_modes = expansion.y_modes();
    let x_mode_refs = x_modes
        .iter()
        .map(|&n| system.mode(n))
        .collect::<Result<Vec<_>>>()?;
    let y_mode_refs = y_modes
        .iter()
        .map(|&m| system.mode(m))
        .collect::<Result<Vec<_>>>()?;
    // phi_m(y_j) for each y-mode, shared by every row
    let y_table: Vec<Vec<f64>> = y_mode_refs
        .iter()
        .map(|mode| (0..grid.ny).map(|j| mode.value(grid.y_at(j))).collect())
        .collect();
    let mut values = vec![0.0; grid.len()];
    values
        .par_chunks_mut(grid.ny)
        .enumerate()
        .for_each(|(i, row)| {
            let x = grid.x_at(i);
            let fx: Vec<f64> = x_mode_refs.iter().map(|mode| mode.value(x)).collect();
            let weights: Vec<Complex64> = y_modes
                .iter()
                .map(|&m| {
                    x_modes
                        .iter()
                        .zip(&fx)
                        .map(|(&n, &f)| expansion.at(n as usize, m as usize) * f)
                        .sum()
                })
                .collect();
            for (j, cell) in row.iter_mut().enumerate() {
                let psi: Complex64 = weights
                    .iter()
                    .zip(&y_table)
                    .map(|(w, col)| w * col[j])
                    .sum();
                *cell = psi.norm_sqr();
            }
        });
    Ok(ScalarField2D {
        spec: *grid,
        values,
    })
}
