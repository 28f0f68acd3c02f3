//! CSV and JSON files written by `kljn run`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use kljn_core::{BerEntry, Histogram, Indicator};
use serde::{Deserialize, Serialize};

use crate::config::ConfigFile;
use crate::error::CliError;

pub const BER_FILE: &str = "ber.csv";
pub const SCATTER_FILE: &str = "scatter.csv";
pub const METADATA_FILE: &str = "metadata.json";

pub const BER_HEADER: [&str; 6] = [
    "indicator",
    "ber_percent",
    "leak_percent",
    "threshold",
    "bits_lh",
    "bits_hl",
];
pub const HISTOGRAM_HEADER: [&str; 4] = ["bin_low", "bin_high", "count_lh", "count_hl"];
pub const SCATTER_HEADER: [&str; 2] = ["v_e_volts", "i_e_amps"];

pub fn histogram_file(indicator: Indicator) -> String {
    format!("hist_{}.csv", indicator.name())
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>, CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_ber(path: &Path, entries: &[BerEntry]) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record(BER_HEADER)?;
    for e in entries {
        w.write_record([
            e.indicator.name().to_string(),
            fmt_f64(e.ber * 100.0),
            fmt_f64(e.leak * 100.0),
            fmt_f64(e.threshold),
            e.bits_lh.to_string(),
            e.bits_hl.to_string(),
        ])?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_histogram(path: &Path, hist: &Histogram) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record(HISTOGRAM_HEADER)?;
    for (lo, hi, lh, hl) in hist.bins() {
        w.write_record([fmt_f64(lo), fmt_f64(hi), lh.to_string(), hl.to_string()])?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// LH trace rows first, then HL trace rows.
pub fn write_scatter(path: &Path, traces: &[&[(f64, f64)]]) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record(SCATTER_HEADER)?;
    for trace in traces {
        for &(v, i) in trace.iter() {
            w.write_record([fmt_f64(v), fmt_f64(i)])?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScatterBits {
    pub lh: Option<u64>,
    pub hl: Option<u64>,
}

/// Provenance record. Flattens the effective config so the file can be fed
/// straight back to `kljn run`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(flatten)]
    pub config: ConfigFile,
    pub generator_algorithm: String,
    pub tool_version: String,
    pub scatter_bits: ScatterBits,
    pub artifacts: Vec<String>,
}

pub fn write_metadata(path: &Path, meta: &Metadata) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, meta)?;
    w.write_all(b"\n").map_err(|e| CliError::io(path, e))?;
    w.flush().map_err(|e| CliError::io(path, e))
}
