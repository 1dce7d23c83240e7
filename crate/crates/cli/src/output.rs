//! File writers for separation results, sweep tables and image products.
//!
//! Every writer is a pure function of its inputs: no timestamps, stable field
//! order, shortest round-trip float formatting. Re-running a command with the
//! same inputs and seed reproduces every byte.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use morphsep_core::error::Result;
use morphsep_core::imaging::{SasImage, TargetStrength};
use morphsep_core::io::{write_grid_csv, write_signal};
use morphsep_core::metrics::IntervalMetrics;
use morphsep_core::signal::Signal;
use morphsep_core::solver::{SeparationResult, SolverConfig};

use crate::sweep::SweepResult;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path)?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, value)?;
    writer.write_all(b"\n")?;
    Ok(())
}

/// Summary of one separation run, serialized as `metrics.json`.
#[derive(Debug, Serialize)]
pub struct SeparationSummary<'a> {
    pub config: &'a SolverConfig,
    pub iterations_run: usize,
    pub final_residual: f64,
    pub relative_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<&'a IntervalMetrics>,
    pub objective_trace: &'a [f64],
}

/// Write `y1.csv`, `y2.csv` (with headers) and `metrics.json` to `dir`.
pub fn write_separation(
    dir: &Path,
    input: &Signal,
    result: &SeparationResult,
    cfg: &SolverConfig,
    metrics: Option<&IntervalMetrics>,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_signal(&dir.join("y1.csv"), &result.y1, Some("short-duration component"))?;
    write_signal(&dir.join("y2.csv"), &result.y2, Some("long-duration component"))?;
    let summary = SeparationSummary {
        config: cfg,
        iterations_run: result.iterations_run,
        final_residual: result.final_residual,
        relative_residual: result.relative_residual(input),
        metrics,
        objective_trace: &result.objective_trace,
    };
    write_json(&dir.join("metrics.json"), &summary)
}

/// Write `records.csv` (tidy long format), `aggregates.json` and
/// `best_lambda.json` for a sweep.
pub fn write_sweep(dir: &Path, result: &SweepResult) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = BufWriter::new(File::create(dir.join("records.csv"))?);
    writeln!(w, "snr_db,lambda_frac,realization,m1,m2,diverged")?;
    for r in &result.records {
        let m1 = r.m1.map(|v| v.to_string()).unwrap_or_default();
        let m2 = r.m2.map(|v| v.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{},{},{}", r.snr_db, r.lambda_frac, r.realization, m1, m2, r.diverged)?;
    }
    drop(w);
    write_json(&dir.join("aggregates.json"), &result.aggregates)?;
    write_json(&dir.join("best_lambda.json"), &result.best_lambda)
}

#[derive(Debug, Serialize)]
struct ImageHeader {
    nx: usize,
    ny: usize,
    extent_m: f64,
    pixel_spacing: f64,
}

/// Write `<stem>_real.csv`, `<stem>_imag.csv` and `<stem>_extent.json`.
pub fn write_image(dir: &Path, stem: &str, image: &SasImage) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let real: Vec<Vec<f64>> = (0..image.ny)
        .map(|iy| (0..image.nx).map(|ix| image.get(ix, iy).re).collect())
        .collect();
    let imag: Vec<Vec<f64>> = (0..image.ny)
        .map(|iy| (0..image.nx).map(|ix| image.get(ix, iy).im).collect())
        .collect();
    write_grid_csv(&dir.join(format!("{stem}_real.csv")), &real)?;
    write_grid_csv(&dir.join(format!("{stem}_imag.csv")), &imag)?;
    write_json(
        &dir.join(format!("{stem}_extent.json")),
        &ImageHeader {
            nx: image.nx,
            ny: image.ny,
            extent_m: image.extent_m,
            pixel_spacing: image.pixel_spacing,
        },
    )
}

#[derive(Debug, Serialize)]
struct NtsAxes<'a> {
    frequencies: &'a [f64],
    angles_deg: &'a [f64],
}

/// Write `<stem>.csv` (frequency-major grid, dB) and `<stem>_axes.json`.
pub fn write_target_strength(dir: &Path, stem: &str, nts: &TargetStrength) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_grid_csv(&dir.join(format!("{stem}.csv")), &nts.values_db)?;
    write_json(
        &dir.join(format!("{stem}_axes.json")),
        &NtsAxes { frequencies: &nts.frequencies, angles_deg: &nts.angles_deg },
    )
}

/// Write a plain magnitude grid.
pub fn write_magnitude_grid(dir: &Path, stem: &str, grid: &[Vec<f64>]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_grid_csv(&dir.join(format!("{stem}.csv")), grid)
}
