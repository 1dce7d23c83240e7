//! Complex time-series container shared by every stage of the toolkit.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A uniformly sampled complex time series.
///
/// Real-valued data is stored with zero imaginary parts so that all frame
/// algebra can operate on a single representation; callers that want a real
/// waveform back take the real part on output.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<Complex64>,
    sample_rate: f64,
}

impl Signal {
    /// Wrap complex samples with their sampling rate.
    pub fn new(samples: Vec<Complex64>, sample_rate: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidDimension("signal must have N >= 1 samples".into()));
        }
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be positive and finite, got {sample_rate}"
            )));
        }
        Ok(Self { samples, sample_rate })
    }

    /// Embed a real waveform with zero imaginary parts.
    pub fn from_real(samples: &[f64], sample_rate: f64) -> Result<Self> {
        Self::new(samples.iter().map(|&r| Complex64::new(r, 0.0)).collect(), sample_rate)
    }

    /// All-zero signal of length `n`.
    pub fn zeros(n: usize, sample_rate: f64) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n], sample_rate)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // N >= 1 is enforced at construction
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    /// Total duration in seconds (`N / f_s`).
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Real parts of the samples.
    pub fn real(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.re).collect()
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.samples.iter().all(|s| s.im == 0.0)
    }

    /// Euclidean norm of the sample vector.
    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// Sum of squared magnitudes.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    /// Mean power per sample.
    pub fn mean_power(&self) -> f64 {
        self.energy() / self.samples.len() as f64
    }

    /// Sample-wise sum; lengths and sampling rates must agree.
    pub fn try_add(&self, rhs: &Signal) -> Result<Signal> {
        if self.sample_rate != rhs.sample_rate {
            return Err(Error::SampleRateMismatch { left: self.sample_rate, right: rhs.sample_rate });
        }
        if self.len() != rhs.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot add signals of length {} and {}",
                self.len(),
                rhs.len()
            )));
        }
        let samples = self
            .samples
            .iter()
            .zip(rhs.samples.iter())
            .map(|(a, b)| a + b)
            .collect();
        Signal::new(samples, self.sample_rate)
    }

    /// Sample-wise difference; lengths and sampling rates must agree.
    pub fn try_sub(&self, rhs: &Signal) -> Result<Signal> {
        if self.sample_rate != rhs.sample_rate {
            return Err(Error::SampleRateMismatch { left: self.sample_rate, right: rhs.sample_rate });
        }
        if self.len() != rhs.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot subtract signals of length {} and {}",
                self.len(),
                rhs.len()
            )));
        }
        let samples = self
            .samples
            .iter()
            .zip(rhs.samples.iter())
            .map(|(a, b)| a - b)
            .collect();
        Signal::new(samples, self.sample_rate)
    }

    /// Scale every sample by a real factor.
    pub fn scaled(&self, factor: f64) -> Signal {
        Signal {
            samples: self.samples.iter().map(|s| s * factor).collect(),
            sample_rate: self.sample_rate,
        }
    }
}

/// Relative l2 distance `||a - b|| / ||b||` between two sample vectors.
///
/// Returns the absolute norm of `a` when `b` is identically zero.
pub fn relative_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "relative_error requires equal lengths");
    let diff: f64 = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let denom: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    if denom == 0.0 {
        diff
    } else {
        diff / denom
    }
}
