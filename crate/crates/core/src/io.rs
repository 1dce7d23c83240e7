//! CSV/JSON import and export for signals, grids and envelope sets.
//!
//! Signals travel as a CSV body (`index,real,imag`) plus a JSON sidecar
//! header carrying the sampling rate. Floating-point values are written with
//! Rust's shortest round-trip formatting, so re-running a command with the
//! same inputs reproduces files byte for byte.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::esp::{EnvelopeSet, EnvelopeSetSpec};
use crate::signal::Signal;

/// JSON sidecar stored next to a signal CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignalHeader {
    pub sample_rate: f64,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Write `<stem>.csv` plus `<stem>.json` for a signal.
pub fn write_signal(csv_path: &Path, signal: &Signal, label: Option<&str>) -> Result<()> {
    write_signal_csv(csv_path, signal)?;
    let header = SignalHeader {
        sample_rate: signal.sample_rate(),
        n: signal.len(),
        label: label.map(str::to_owned),
    };
    let file = File::create(sidecar_path(csv_path))?;
    serde_json::to_writer_pretty(BufWriter::new(file), &header)?;
    Ok(())
}

/// Write only the CSV body (`index,real,imag`).
pub fn write_signal_csv(path: &Path, signal: &Signal) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "index,real,imag")?;
    for (i, s) in signal.samples().iter().enumerate() {
        writeln!(w, "{},{},{}", i, s.re, s.im)?;
    }
    Ok(())
}

/// Read a signal CSV whose sampling rate is known out of band.
pub fn read_signal_csv(path: &Path, sample_rate: f64) -> Result<Signal> {
    let reader = BufReader::new(File::open(path)?);
    let mut samples = Vec::new();
    for (line_no, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || (line_no == 0 && trimmed.starts_with("index")) {
            continue;
        }
        let mut parts = trimmed.split(',');
        let _index = parts.next();
        let re = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("{}:{}: missing real column", path.display(), line_no + 1)))?;
        let im = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("{}:{}: missing imag column", path.display(), line_no + 1)))?;
        let re: f64 = re
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("{}:{}: bad real value: {e}", path.display(), line_no + 1)))?;
        let im: f64 = im
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("{}:{}: bad imag value: {e}", path.display(), line_no + 1)))?;
        samples.push(Complex64::new(re, im));
    }
    Signal::new(samples, sample_rate)
}

/// Read `<stem>.csv` using the sampling rate from `<stem>.json`.
pub fn read_signal(csv_path: &Path) -> Result<Signal> {
    let header_path = sidecar_path(csv_path);
    let header: SignalHeader = serde_json::from_reader(BufReader::new(File::open(&header_path).map_err(
        |e| Error::Parse(format!("cannot open header {}: {e}", header_path.display())),
    )?))?;
    let signal = read_signal_csv(csv_path, header.sample_rate)?;
    if signal.len() != header.n {
        return Err(Error::Parse(format!(
            "{}: header says {} samples, CSV holds {}",
            csv_path.display(),
            header.n,
            signal.len()
        )));
    }
    Ok(signal)
}

/// Write a real-valued grid as bare CSV rows.
pub fn write_grid_csv(path: &Path, rows: &[Vec<f64>]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                write!(w, ",")?;
            }
            write!(w, "{v}")?;
            first = false;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Read a real-valued grid written by [`write_grid_csv`].
pub fn read_grid_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let reader = BufReader::new(File::open(path)?);
    let mut rows = Vec::new();
    for (line_no, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> = line.split(',').map(|v| v.trim().parse()).collect();
        rows.push(row.map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), line_no + 1)))?);
    }
    Ok(rows)
}

/// Serialize an envelope set to pretty JSON.
pub fn write_envelope_set(path: &Path, set: &EnvelopeSet) -> Result<()> {
    let file = File::create(path)?;
    serde_json::to_writer_pretty(BufWriter::new(file), &set.to_spec())?;
    Ok(())
}

/// Load an envelope set from JSON.
pub fn read_envelope_set(path: &Path) -> Result<EnvelopeSet> {
    let spec: EnvelopeSetSpec = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    EnvelopeSet::from_spec(&spec)
}
