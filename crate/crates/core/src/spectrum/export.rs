use std::io::Write;

use serde::{Deserialize, Serialize};

use super::OrderedSpectrum;
use crate::error::Result;

/// One exported row of an ordered spectrum. Member lists are `;`-separated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub index: usize,
    pub n_list: String,
    pub m_list: String,
    pub multiplicity: usize,
    pub classification: String,
    pub a: u64,
    pub b: u64,
    pub shifted_energy: f64,
    pub scaled_energy: f64,
}

impl OrderedSpectrum {
    pub fn rows(&self) -> Vec<SpectrumRow> {
        let epsilon = self.parameter().epsilon();
        self.levels()
            .iter()
            .enumerate()
            .map(|(index, level)| {
                let join = |f: fn(&super::QuantumPair) -> u32| {
                    level
                        .members
                        .iter()
                        .map(|p| f(p).to_string())
                        .collect::<Vec<_>>()
                        .join(";")
                };
                SpectrumRow {
                    index,
                    n_list: join(|p| p.n),
                    m_list: join(|p| p.m),
                    multiplicity: level.multiplicity(),
                    classification: level.classification.as_str().to_string(),
                    a: level.key.a,
                    b: level.key.b,
                    shifted_energy: level.shifted_energy,
                    scaled_energy: level.scaled_energy(epsilon),
                }
            })
            .collect()
    }
}

pub fn write_spectrum_csv<W: Write>(spectrum: &OrderedSpectrum, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in spectrum.rows() {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SpectrumDocument<'a> {
    p_text: &'a str,
    mode: String,
    k: u32,
    epsilon: f64,
    xi: usize,
    levels: Vec<SpectrumRow>,
}

/// JSON mirror of the CSV with the parameter header.
pub fn write_spectrum_json<W: Write>(spectrum: &OrderedSpectrum, mut out: W) -> Result<()> {
    let param = spectrum.parameter();
    let doc = SpectrumDocument {
        p_text: param.p_text(),
        mode: param.mode().to_string(),
        k: param.k(),
        epsilon: param.epsilon(),
        xi: spectrum.xi(),
        levels: spectrum.rows(),
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}
