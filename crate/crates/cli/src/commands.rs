use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use morsekit::basis::{density_grid, DensityMetadata, Expansion, MorseSystem, MuBasis};
use morsekit::coherent::{
    bg_residual, bg_residual_analytic, first_separation, ladder_f, uncertainty_sweep,
    write_sweep_csv, UncertaintyContext,
};
use morsekit::spectrum::{
    count_summary, enumerate_levels, order_spectrum, write_spectrum_csv, write_spectrum_json,
    Classification,
};
use morsekit::{MorseError, Result};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{Format, RunConfig};

/// Which state a density is drawn for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selector {
    Mu(usize),
    Coherent(Complex64),
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir).map_err(|e| MorseError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    let file =
        File::create(&path).map_err(|e| MorseError::Io(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn finish(mut writer: BufWriter<File>) -> Result<()> {
    writer.flush()?;
    Ok(())
}

fn system_and_basis(run: &RunConfig) -> Result<(MorseSystem, MuBasis)> {
    let spectrum = order_spectrum(&run.parameter)?;
    let system = MorseSystem::new(run.parameter.clone(), run.beta)?;
    let basis = MuBasis::new(spectrum, run.mixing)?;
    Ok((system, basis))
}

pub fn spectrum(run: &RunConfig) -> Result<()> {
    let spectrum = order_spectrum(&run.parameter)?;
    let param = &run.parameter;
    let census = count_summary(spectrum.levels());
    for format in run.formats_or(&[Format::Csv, Format::Json]) {
        match format {
            Format::Csv => {
                let mut out = create(&run.out, "spectrum.csv")?;
                write_spectrum_csv(&spectrum, &mut out)?;
                finish(out)?;
            }
            Format::Json => {
                let mut out = create(&run.out, "spectrum.json")?;
                write_spectrum_json(&spectrum, &mut out)?;
                finish(out)?;
            }
            Format::Pgm => return Err(MorseError::Parse("spectrum has no pgm output".into())),
        }
    }
    println!(
        "p = {} ({}), k = {}, epsilon = {}, xi = {}",
        param.p_text(),
        param.mode(),
        param.k(),
        param.epsilon(),
        spectrum.xi()
    );
    println!(
        "states {} swap-reduced {} distinct {} accidental {}",
        census.total_states, census.swap_reduced, census.distinct, census.accidental
    );
    Ok(())
}

#[derive(Serialize)]
struct AccidentalEntry {
    index: usize,
    members: Vec<(u32, u32)>,
    shifted_energy: f64,
}

pub fn degeneracy(run: &RunConfig) -> Result<()> {
    let census = count_summary(&enumerate_levels(&run.parameter));
    let spectrum = order_spectrum(&run.parameter)?;
    let accidental: Vec<AccidentalEntry> = spectrum
        .levels()
        .iter()
        .enumerate()
        .filter(|(_, level)| level.classification == Classification::Accidental)
        .map(|(index, level)| AccidentalEntry {
            index,
            members: level.members.iter().map(|p| (p.n, p.m)).collect(),
            shifted_energy: level.shifted_energy,
        })
        .collect();
    for format in run.formats_or(&[Format::Csv]) {
        match format {
            Format::Csv => {
                let mut out = create(&run.out, "accidental.csv")?;
                writeln!(out, "index,members,multiplicity,shifted_energy")?;
                for entry in &accidental {
                    let members: Vec<String> = entry
                        .members
                        .iter()
                        .map(|(n, m)| format!("({n} {m})"))
                        .collect();
                    writeln!(
                        out,
                        "{},{},{},{:.15e}",
                        entry.index,
                        members.join(";"),
                        entry.members.len(),
                        entry.shifted_energy
                    )?;
                }
                finish(out)?;
            }
            Format::Json => {
                let mut out = create(&run.out, "accidental.json")?;
                serde_json::to_writer_pretty(
                    &mut out,
                    &serde_json::json!({
                        "p_text": run.parameter.p_text(),
                        "mode": run.parameter.mode().to_string(),
                        "census": census,
                        "accidental": accidental,
                    }),
                )?;
                writeln!(out)?;
                finish(out)?;
            }
            Format::Pgm => return Err(MorseError::Parse("degeneracy has no pgm output".into())),
        }
    }
    println!(
        "{} {} {} {}",
        census.total_states, census.swap_reduced, census.distinct, census.accidental
    );
    println!("accidental levels: {}", accidental.len());
    Ok(())
}

pub fn density(run: &RunConfig, selector: Selector) -> Result<()> {
    let (system, basis) = system_and_basis(run)?;
    let (expansion, descriptor, psi): (Expansion, String, Option<Complex64>) = match selector {
        Selector::Mu(index) => {
            let state = basis.state(index)?;
            (
                state.expansion(system.k()),
                format!("mu_{index} {}", state.label()),
                None,
            )
        }
        Selector::Coherent(psi) => {
            let coherent =
                morsekit::coherent::coherent_coefficients(psi, &ladder_f(basis.spectrum())?)?;
            (
                coherent.expansion(&basis)?,
                format!("coherent psi={},{}", psi.re, psi.im),
                Some(psi),
            )
        }
    };
    let covering = system.support_of(&expansion.modes(), run.quadrature.truncation)?;
    let grid = run.grid_spec(covering)?;
    let field = density_grid(&system, &expansion, &grid)?;
    for format in run.formats_or(&[Format::Csv, Format::Pgm, Format::Json]) {
        match format {
            Format::Csv => {
                let mut out = create(&run.out, "density.csv")?;
                field.write_csv(&mut out)?;
                finish(out)?;
            }
            Format::Pgm => {
                let mut out = create(&run.out, "density.pgm")?;
                field.write_pgm(&mut out)?;
                finish(out)?;
            }
            Format::Json => {
                let mixing = basis.mixing();
                let meta = DensityMetadata {
                    p_text: run.parameter.p_text().to_string(),
                    mode: run.parameter.mode().to_string(),
                    state: descriptor.clone(),
                    gamma: [mixing.gamma().re, mixing.gamma().im],
                    delta: [mixing.delta().re, mixing.delta().im],
                    psi: psi.map(|z| [z.re, z.im]),
                    grid,
                    max: field.max(),
                    riemann_sum: field.riemann_sum(),
                };
                let mut out = create(&run.out, "density.json")?;
                meta.write_json(&mut out)?;
                finish(out)?;
            }
        }
    }
    println!(
        "{descriptor}: {}x{} grid over x [{:.4}, {:.4}], y [{:.4}, {:.4}], riemann sum {:.6}, cells above 1e-6 of max {:.6}",
        grid.nx,
        grid.ny,
        grid.x_min,
        grid.x_max,
        grid.y_min,
        grid.y_max,
        field.riemann_sum(),
        field.fraction_above(1e-6)
    );
    Ok(())
}

pub fn uncertainty(run: &RunConfig, psi_values: &[f64]) -> Result<()> {
    let (system, basis) = system_and_basis(run)?;
    let context = UncertaintyContext::new(system, basis, &run.quadrature)?;
    let rows = uncertainty_sweep(&context, psi_values)?;
    for format in run.formats_or(&[Format::Csv]) {
        match format {
            Format::Csv => {
                let mut out = create(&run.out, "uncertainty.csv")?;
                write_sweep_csv(&rows, &mut out)?;
                finish(out)?;
            }
            Format::Json => {
                let mut out = create(&run.out, "uncertainty.json")?;
                serde_json::to_writer_pretty(&mut out, &rows)?;
                writeln!(out)?;
                finish(out)?;
            }
            Format::Pgm => return Err(MorseError::Parse("uncertainty has no pgm output".into())),
        }
    }
    let floor = rows.iter().map(|r| r.product).fold(f64::INFINITY, f64::min);
    println!(
        "{} amplitudes, smallest variance product {floor:.9}",
        psi_values.len()
    );
    match first_separation(&rows, 0.01) {
        Some(psi) => println!("x/y products first differ by more than 1% at psi = {psi}"),
        None => println!("x/y products stay within 1% of each other"),
    }
    Ok(())
}

pub fn coherent(run: &RunConfig, psi: Complex64) -> Result<()> {
    let (_, basis) = system_and_basis(run)?;
    let state = morsekit::coherent::coherent_coefficients(psi, &ladder_f(basis.spectrum())?)?;
    for format in run.formats_or(&[Format::Json]) {
        match format {
            Format::Json => {
                let mut out = create(&run.out, "coherent.json")?;
                state.dump(&basis).write_json(&mut out)?;
                finish(out)?;
            }
            other => {
                return Err(MorseError::Parse(format!(
                    "coherent writes json only, not {other:?}"
                )))
            }
        }
    }
    println!(
        "psi = {psi}, xi = {}, ln N = {:.12}, norm = {:.15}, residual {:.6e} (analytic {:.6e})",
        state.xi(),
        state.ln_normalization(),
        state.norm_sqr(),
        bg_residual(&state),
        bg_residual_analytic(&state)
    );
    Ok(())
}
