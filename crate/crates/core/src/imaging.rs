//! Circular-aperture scan model and the imaging pipeline: per-angle
//! separation, time-domain backprojection, normalized target strength and
//! k-space products.
//!
//! Backprojection (delay-and-sum over the aperture) stands in for Fourier
//! polar-format image formation: it is exactly linear, which is what the
//! separation-then-image experiments rely on.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::io;
use crate::metrics::{interval_errors, mean_std, IntervalMetrics, TimeInterval};
use crate::signal::Signal;
use crate::solver::{solve_mca, SolverConfig};

/// Monostatic sensor geometry for a turntable scan.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScanGeometry {
    /// Sensor distance from the turntable center, meters.
    pub standoff_m: f64,
    /// Propagation speed, m/s.
    pub sound_speed: f64,
}

/// Angle-indexed collection of time series sharing length, sampling rate and
/// geometry. Sample `j` of every series corresponds to absolute time
/// `window.0 + j / f_s`.
#[derive(Debug, Clone)]
pub struct CircularScan {
    angles_deg: Vec<f64>,
    series: Vec<Signal>,
    pub geometry: ScanGeometry,
    /// Retained time window `[t_start, t_end)`, seconds.
    pub window: (f64, f64),
}

impl CircularScan {
    pub fn new(
        angles_deg: Vec<f64>,
        series: Vec<Signal>,
        geometry: ScanGeometry,
        window: (f64, f64),
    ) -> Result<Self> {
        if angles_deg.is_empty() || angles_deg.len() != series.len() {
            return Err(Error::ScanFormat(format!(
                "scan needs matching angle and series counts, got {} and {}",
                angles_deg.len(),
                series.len()
            )));
        }
        if !angles_deg.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::ScanFormat("angles must be strictly increasing".into()));
        }
        let n = series[0].len();
        let fs = series[0].sample_rate();
        let offending: Vec<f64> = angles_deg
            .iter()
            .zip(series.iter())
            .filter(|(_, s)| s.len() != n || s.sample_rate() != fs)
            .map(|(a, _)| *a)
            .collect();
        if !offending.is_empty() {
            return Err(Error::ScanFormat(format!(
                "inconsistent N or sample rate at angles {offending:?}"
            )));
        }
        if !(window.1 > window.0) {
            return Err(Error::ScanFormat(format!(
                "window [{}, {}) must have positive length",
                window.0, window.1
            )));
        }
        Ok(Self { angles_deg, series, geometry, window })
    }

    pub fn angles_deg(&self) -> &[f64] {
        &self.angles_deg
    }

    pub fn series(&self) -> &[Signal] {
        &self.series
    }

    pub fn num_angles(&self) -> usize {
        self.angles_deg.len()
    }

    pub fn samples_per_angle(&self) -> usize {
        self.series[0].len()
    }

    pub fn sample_rate(&self) -> f64 {
        self.series[0].sample_rate()
    }

    /// Sample-wise sum with another scan over the same aperture.
    pub fn try_add(&self, rhs: &CircularScan) -> Result<CircularScan> {
        if self.angles_deg != rhs.angles_deg {
            return Err(Error::ScanFormat("scans cover different angle sets".into()));
        }
        let series: Result<Vec<Signal>> = self
            .series
            .iter()
            .zip(rhs.series.iter())
            .map(|(a, b)| a.try_add(b))
            .collect();
        CircularScan::new(self.angles_deg.clone(), series?, self.geometry, self.window)
    }

    /// Replace the per-angle series, keeping angles and geometry.
    pub fn with_series(&self, series: Vec<Signal>) -> Result<CircularScan> {
        CircularScan::new(self.angles_deg.clone(), series, self.geometry, self.window)
    }
}

/// A point reflector on the turntable plane, optionally ringing after the
/// geometric return.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointScatterer {
    /// Position in meters, turntable frame.
    pub x: f64,
    pub y: f64,
    pub amplitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonance: Option<ScattererResonance>,
}

/// Exponentially decaying tail attached to a scatterer's arrival.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScattererResonance {
    pub frequency: f64,
    pub time_constant: f64,
    pub amplitude: f64,
}

/// Forward model for synthesizing desk-scale scans.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanSpec {
    pub scatterers: Vec<PointScatterer>,
    pub geometry: ScanGeometry,
    pub angles_deg: Vec<f64>,
    pub sample_rate: f64,
    /// Retained window `[t_start, t_end)`, seconds.
    pub window: (f64, f64),
    /// Carrier of the interrogating pulse, Hz; zero gives a basebanded
    /// (envelope-only) pulse, which focuses without carrier fringes.
    pub pulse_center_freq: f64,
    /// Gaussian envelope width of the pulse, seconds.
    pub pulse_sigma: f64,
}

impl ScanSpec {
    /// Eight-angle in-air scan with two reflectors, one of them resonant.
    pub fn desk_default() -> Self {
        Self {
            scatterers: vec![
                PointScatterer { x: 0.05, y: 0.0, amplitude: 1.0, resonance: None },
                PointScatterer {
                    x: -0.04,
                    y: 0.03,
                    amplitude: 0.7,
                    resonance: Some(ScattererResonance {
                        frequency: 9_000.0,
                        time_constant: 0.4e-3,
                        amplitude: 0.25,
                    }),
                },
            ],
            geometry: ScanGeometry { standoff_m: 1.0, sound_speed: 343.0 },
            angles_deg: (0..8).map(|i| i as f64 * 45.0).collect(),
            sample_rate: 100_000.0,
            window: (3e-3, 8e-3),
            pulse_center_freq: 20_000.0,
            pulse_sigma: 5e-5,
        }
    }
}

/// Render a [`ScanSpec`] through the point-target forward model.
///
/// Each angle's series holds, per scatterer, a complex analytic pulse at the
/// two-way travel time plus any resonant tail.
pub fn synthesize_scan(spec: &ScanSpec) -> Result<CircularScan> {
    if spec.scatterers.is_empty() {
        return Err(Error::ScanFormat("scan spec needs at least one scatterer".into()));
    }
    let n = ((spec.window.1 - spec.window.0) * spec.sample_rate).round() as usize;
    if n == 0 {
        return Err(Error::ScanFormat("scan window shorter than one sample".into()));
    }
    let mut series = Vec::with_capacity(spec.angles_deg.len());
    for &angle in &spec.angles_deg {
        let theta = angle.to_radians();
        let sx = spec.geometry.standoff_m * theta.cos();
        let sy = spec.geometry.standoff_m * theta.sin();
        let mut samples = vec![Complex64::new(0.0, 0.0); n];
        for sc in &spec.scatterers {
            let dist = ((sc.x - sx).powi(2) + (sc.y - sy).powi(2)).sqrt();
            let delay = 2.0 * dist / spec.geometry.sound_speed;
            for (j, out) in samples.iter_mut().enumerate() {
                let t = spec.window.0 + j as f64 / spec.sample_rate - delay;
                let envelope = (-t * t / (2.0 * spec.pulse_sigma * spec.pulse_sigma)).exp();
                if envelope > 1e-12 {
                    *out += sc.amplitude
                        * envelope
                        * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * spec.pulse_center_freq * t);
                }
                if let Some(res) = &sc.resonance {
                    if t > 0.0 {
                        *out += sc.amplitude
                            * res.amplitude
                            * (-t / res.time_constant).exp()
                            * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * res.frequency * t);
                    }
                }
            }
        }
        series.push(Signal::new(samples, spec.sample_rate)?);
    }
    CircularScan::new(spec.angles_deg.clone(), series, spec.geometry, spec.window)
}

/// Per-angle outcome of a scan separation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AngleOutcome {
    pub angle_deg: f64,
    /// Interval metrics for the separated pair, absent when the solve failed.
    pub metrics: Option<IntervalMetrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub final_residual: f64,
}

/// Result of separating every angle of a scan.
#[derive(Debug)]
pub struct ScanSeparation {
    pub short_scan: CircularScan,
    pub long_scan: CircularScan,
    pub per_angle: Vec<AngleOutcome>,
    pub mean_m1: f64,
    pub std_m1: f64,
    pub mean_m2: f64,
    pub std_m2: f64,
}

/// Apply two-frame separation to each angle of a scan.
///
/// Solver failures are recorded per angle (the corresponding output series
/// stay zero) without aborting the remaining angles.
pub fn separate_scan(
    scan: &CircularScan,
    a1: &dyn Frame,
    a2: &dyn Frame,
    cfg: &SolverConfig,
    interval1: TimeInterval,
    interval2: TimeInterval,
) -> Result<ScanSeparation> {
    let n = scan.samples_per_angle();
    if a1.signal_dim() != n || a2.signal_dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "frames sized {} / {} but scan series have {} samples",
            a1.signal_dim(),
            a2.signal_dim(),
            n
        )));
    }
    // Intervals are quoted in absolute time; shift into the windowed frame.
    let t0 = scan.window.0;
    let shift = |iv: TimeInterval| TimeInterval::new(iv.start - t0, iv.end - t0);
    let i1 = shift(interval1)?;
    let i2 = shift(interval2)?;

    let fs = scan.sample_rate();
    let mut short_series = Vec::with_capacity(scan.num_angles());
    let mut long_series = Vec::with_capacity(scan.num_angles());
    let mut per_angle = Vec::with_capacity(scan.num_angles());
    let mut m1s = Vec::new();
    let mut m2s = Vec::new();

    for (idx, y) in scan.series().iter().enumerate() {
        let angle = scan.angles_deg()[idx];
        match solve_mca(y, a1, a2, cfg) {
            Ok(res) => {
                // an undefined metric (e.g. a silent angle) is recorded, not fatal
                let (metrics, error) = match interval_errors(y, &res.y1, &res.y2, i1, i2, None) {
                    Ok(m) => {
                        m1s.push(m.m1);
                        m2s.push(m.m2);
                        (Some(m), None)
                    }
                    Err(e) => (None, Some(e.to_string())),
                };
                per_angle.push(AngleOutcome {
                    angle_deg: angle,
                    metrics,
                    error,
                    final_residual: res.final_residual,
                });
                short_series.push(res.y1);
                long_series.push(res.y2);
            }
            Err(e) => {
                per_angle.push(AngleOutcome {
                    angle_deg: angle,
                    metrics: None,
                    error: Some(e.to_string()),
                    final_residual: f64::NAN,
                });
                short_series.push(Signal::zeros(n, fs)?);
                long_series.push(Signal::zeros(n, fs)?);
            }
        }
    }

    let (mean_m1, std_m1) = mean_std(&m1s);
    let (mean_m2, std_m2) = mean_std(&m2s);
    Ok(ScanSeparation {
        short_scan: scan.with_series(short_series)?,
        long_scan: scan.with_series(long_series)?,
        per_angle,
        mean_m1,
        std_m1,
        mean_m2,
        std_m2,
    })
}

/// Square pixel grid centered on the turntable axis.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSpec {
    /// Pixels per axis.
    pub pixels: usize,
    /// Half-width of the imaged square, meters.
    pub extent_m: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { pixels: 128, extent_m: 0.15 }
    }
}

/// Complex backprojected image on a square grid.
#[derive(Debug, Clone)]
pub struct SasImage {
    /// Row-major pixels, `pixels[iy * nx + ix]`; `ix` indexes x, `iy` indexes y.
    pub pixels: Vec<Complex64>,
    pub nx: usize,
    pub ny: usize,
    /// Half-width of the grid, meters.
    pub extent_m: f64,
    pub pixel_spacing: f64,
}

impl SasImage {
    pub fn get(&self, ix: usize, iy: usize) -> Complex64 {
        self.pixels[iy * self.nx + ix]
    }

    /// Pixel-center coordinate along one axis.
    pub fn coordinate(&self, index: usize) -> f64 {
        -self.extent_m + (index as f64 + 0.5) * self.pixel_spacing
    }

    /// Index of the magnitude peak as (ix, iy).
    pub fn peak_index(&self) -> (usize, usize) {
        let mut best = (0usize, 0.0f64);
        for (i, p) in self.pixels.iter().enumerate() {
            let m = p.norm();
            if m > best.1 {
                best = (i, m);
            }
        }
        (best.0 % self.nx, best.0 / self.nx)
    }
}

/// Delay-and-sum image formation over the circular aperture.
///
/// Every pixel accumulates the linearly interpolated sample at the two-way
/// travel time from each sensor position; travel times outside the retained
/// window contribute zero. Angles accumulate in a fixed order, so the result
/// is independent of available parallelism.
pub fn backproject(scan: &CircularScan, grid: GridSpec) -> Result<SasImage> {
    if grid.pixels == 0 || !(grid.extent_m > 0.0) {
        return Err(Error::InvalidParameter("grid needs pixels >= 1 and a positive extent".into()));
    }
    let npix = grid.pixels;
    let spacing = 2.0 * grid.extent_m / npix as f64;
    let n = scan.samples_per_angle();
    let fs = scan.sample_rate();
    let t0 = scan.window.0;
    let sensors: Vec<(f64, f64)> = scan
        .angles_deg()
        .iter()
        .map(|a| {
            let th = a.to_radians();
            (scan.geometry.standoff_m * th.cos(), scan.geometry.standoff_m * th.sin())
        })
        .collect();

    let mut pixels = vec![Complex64::new(0.0, 0.0); npix * npix];
    pixels
        .par_chunks_mut(npix)
        .enumerate()
        .for_each(|(iy, row)| {
            let py = -grid.extent_m + (iy as f64 + 0.5) * spacing;
            for (ix, out) in row.iter_mut().enumerate() {
                let px = -grid.extent_m + (ix as f64 + 0.5) * spacing;
                let mut acc = Complex64::new(0.0, 0.0);
                for (series, (sx, sy)) in scan.series().iter().zip(sensors.iter()) {
                    let dist = ((px - sx).powi(2) + (py - sy).powi(2)).sqrt();
                    let u = (2.0 * dist / scan.geometry.sound_speed - t0) * fs;
                    if u >= 0.0 && u <= (n - 1) as f64 {
                        let i0 = u.floor() as usize;
                        let frac = u - i0 as f64;
                        let s = series.samples();
                        let v = if i0 + 1 < n {
                            s[i0] * (1.0 - frac) + s[i0 + 1] * frac
                        } else {
                            s[i0]
                        };
                        acc += v;
                    }
                }
                *out = acc;
            }
        });

    Ok(SasImage { pixels, nx: npix, ny: npix, extent_m: grid.extent_m, pixel_spacing: spacing })
}

/// Normalization mode for [`normalized_target_strength_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NtsNormalization {
    /// Divide by the single largest bin over all (frequency, angle) cells.
    GlobalMax,
    /// Divide each frequency row by its own maximum over angle.
    PerFrequency,
}

/// Per-angle spectra normalized across the aperture, in dB.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetStrength {
    /// `values_db[f][a]`: frequency-major grid.
    pub values_db: Vec<Vec<f64>>,
    pub frequencies: Vec<f64>,
    pub angles_deg: Vec<f64>,
}

/// dB floor substituted for empty bins so outputs stay finite.
const NTS_FLOOR_DB: f64 = -300.0;

/// Normalized target strength with the global-max convention.
pub fn normalized_target_strength(scan: &CircularScan) -> Result<TargetStrength> {
    normalized_target_strength_with(scan, NtsNormalization::GlobalMax)
}

/// One-sided magnitude spectra of every angle, normalized and expressed in dB.
pub fn normalized_target_strength_with(
    scan: &CircularScan,
    normalization: NtsNormalization,
) -> Result<TargetStrength> {
    let n = scan.samples_per_angle();
    let fs = scan.sample_rate();
    let n_freq = n / 2 + 1;
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];

    // magnitude[a][f]
    let mut magnitudes = Vec::with_capacity(scan.num_angles());
    for series in scan.series() {
        let mut buf = series.samples().to_vec();
        fft.process_with_scratch(&mut buf, &mut scratch);
        magnitudes.push(buf[..n_freq].iter().map(|v| v.norm()).collect::<Vec<f64>>());
    }
    let global_max = magnitudes
        .iter()
        .flat_map(|row| row.iter().copied())
        .fold(0.0f64, f64::max);
    if global_max == 0.0 {
        return Err(Error::UndefinedMetric("target strength of an all-zero scan".into()));
    }

    let mut values_db = vec![vec![0.0; scan.num_angles()]; n_freq];
    for f in 0..n_freq {
        let row_max = match normalization {
            NtsNormalization::GlobalMax => global_max,
            NtsNormalization::PerFrequency => magnitudes
                .iter()
                .map(|row| row[f])
                .fold(0.0f64, f64::max),
        };
        for a in 0..scan.num_angles() {
            let v = magnitudes[a][f];
            values_db[f][a] = if v > 0.0 && row_max > 0.0 {
                (20.0 * (v / row_max).log10()).max(NTS_FLOOR_DB)
            } else {
                NTS_FLOOR_DB
            };
        }
    }

    Ok(TargetStrength {
        values_db,
        frequencies: (0..n_freq).map(|k| k as f64 * fs / n as f64).collect(),
        angles_deg: scan.angles_deg().to_vec(),
    })
}

/// Centered 2-D Fourier magnitude of a complex image.
pub fn k_space(image: &SasImage) -> Vec<Vec<f64>> {
    let (nx, ny) = (image.nx, image.ny);
    let mut planner = FftPlanner::new();
    let fft_x = planner.plan_fft_forward(nx);
    let fft_y = planner.plan_fft_forward(ny);

    let mut rows: Vec<Vec<Complex64>> = (0..ny)
        .map(|iy| image.pixels[iy * nx..(iy + 1) * nx].to_vec())
        .collect();
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft_x.get_inplace_scratch_len()];
    for row in rows.iter_mut() {
        fft_x.process_with_scratch(row, &mut scratch);
    }
    let mut scratch_y = vec![Complex64::new(0.0, 0.0); fft_y.get_inplace_scratch_len()];
    let mut col = vec![Complex64::new(0.0, 0.0); ny];
    for ix in 0..nx {
        for iy in 0..ny {
            col[iy] = rows[iy][ix];
        }
        fft_y.process_with_scratch(&mut col, &mut scratch_y);
        for iy in 0..ny {
            rows[iy][ix] = col[iy];
        }
    }
    // center the zero-frequency bin
    let mut out = vec![vec![0.0; nx]; ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let sy = (iy + ny / 2) % ny;
            let sx = (ix + nx / 2) % nx;
            out[sy][sx] = rows[iy][ix].norm();
        }
    }
    out
}

/// On-disk manifest describing a scan directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanManifest {
    pub sound_speed: f64,
    pub standoff_distance: f64,
    pub sample_rate: f64,
    /// Retained window `[t_start, t_end)`, seconds.
    pub window: [f64; 2],
    pub angles: Vec<f64>,
    /// True when the CSVs already hold only the retained window; false means
    /// they start at t = 0 and ingestion crops them.
    #[serde(default)]
    pub windowed: bool,
}

fn angle_file_name(index: usize) -> String {
    format!("angle_{index:04}.csv")
}

/// Write a scan as `manifest.json` plus one CSV per angle.
pub fn export_scan(scan: &CircularScan, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let manifest = ScanManifest {
        sound_speed: scan.geometry.sound_speed,
        standoff_distance: scan.geometry.standoff_m,
        sample_rate: scan.sample_rate(),
        window: [scan.window.0, scan.window.1],
        angles: scan.angles_deg().to_vec(),
        windowed: true,
    };
    let file = std::fs::File::create(dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), &manifest)?;
    for (i, series) in scan.series().iter().enumerate() {
        io::write_signal_csv(&dir.join(angle_file_name(i)), series)?;
    }
    Ok(())
}

/// Load a scan directory written by [`export_scan`] or assembled by hand.
///
/// Validates per-angle lengths and applies window cropping when the manifest
/// marks the CSVs as unwindowed.
pub fn ingest_scan(dir: &Path) -> Result<CircularScan> {
    let manifest_path = dir.join("manifest.json");
    let manifest: ScanManifest = serde_json::from_reader(std::io::BufReader::new(
        std::fs::File::open(&manifest_path)
            .map_err(|e| Error::ScanFormat(format!("cannot open {}: {e}", manifest_path.display())))?,
    ))?;
    let fs = manifest.sample_rate;
    let expected = ((manifest.window[1] - manifest.window[0]) * fs).round() as usize;
    if expected == 0 {
        return Err(Error::ScanFormat("manifest window shorter than one sample".into()));
    }

    let mut series = Vec::with_capacity(manifest.angles.len());
    let mut bad_lengths = Vec::new();
    for (i, &angle) in manifest.angles.iter().enumerate() {
        let path = dir.join(angle_file_name(i));
        if !path.exists() {
            return Err(Error::ScanFormat(format!(
                "missing time series for angle {angle} deg (expected {})",
                path.display()
            )));
        }
        let raw = io::read_signal_csv(&path, fs)?;
        let signal = if manifest.windowed {
            if raw.len() != expected {
                bad_lengths.push(angle);
            }
            raw
        } else {
            let start = (manifest.window[0] * fs).round() as usize;
            if raw.len() < start + expected {
                bad_lengths.push(angle);
                raw
            } else {
                Signal::new(raw.samples()[start..start + expected].to_vec(), fs)?
            }
        };
        series.push(signal);
    }
    if !bad_lengths.is_empty() {
        return Err(Error::ScanFormat(format!(
            "series too short or of unexpected length at angles {bad_lengths:?}"
        )));
    }

    CircularScan::new(
        manifest.angles,
        series,
        ScanGeometry { standoff_m: manifest.standoff_distance, sound_speed: manifest.sound_speed },
        (manifest.window[0], manifest.window[1]),
    )
}
