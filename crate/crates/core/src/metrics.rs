//! Interval-restricted separation-error metrics.
//!
//! The short-duration component is scored on an early-time interval and the
//! long-duration component on a late-time interval:
//!
//! ```text
//! m1 = || y|_I1 - y1|_I1 || / || y|_I1 ||
//! m2 = || y|_I2 - y2|_I2 || / || y|_I2 ||
//! ```
//!
//! where `y` is replaced by a clean reference when one is supplied.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Half-open time interval `[start, end)` in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeInterval {
    pub start: f64,
    pub end: f64,
}

impl TimeInterval {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(start >= 0.0) || !(end > start) {
            return Err(Error::InvalidParameter(format!(
                "interval [{start}, {end}) must satisfy 0 <= start < end"
            )));
        }
        Ok(Self { start, end })
    }

    /// Sample indices covered by the interval at the given rate.
    ///
    /// Boundaries landing exactly on a sample are resolved with a small
    /// guard so that `k / f_s` belongs to an interval starting at `k / f_s`.
    pub fn sample_range(&self, sample_rate: f64, n: usize) -> Result<std::ops::Range<usize>> {
        let lo = (self.start * sample_rate - 1e-9).ceil().max(0.0) as usize;
        let hi = ((self.end * sample_rate - 1e-9).ceil() as usize).min(n);
        if lo >= n || lo >= hi {
            return Err(Error::InvalidParameter(format!(
                "interval [{}, {}) s holds no samples within a {}-sample signal at {} Hz",
                self.start, self.end, n, sample_rate
            )));
        }
        Ok(lo..hi)
    }

    /// Default early/late intervals for the analytic experiments: 1-2 ms and
    /// 2-6 ms.
    pub fn analytic_defaults() -> (TimeInterval, TimeInterval) {
        (TimeInterval { start: 1e-3, end: 2e-3 }, TimeInterval { start: 2e-3, end: 6e-3 })
    }

    /// Default early/late intervals for the imaging experiments: 4-6 ms and
    /// 6-8 ms.
    pub fn imaging_defaults() -> (TimeInterval, TimeInterval) {
        (TimeInterval { start: 4e-3, end: 6e-3 }, TimeInterval { start: 6e-3, end: 8e-3 })
    }
}

/// Early-time and late-time relative errors with the intervals they were
/// measured on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntervalMetrics {
    pub interval1: TimeInterval,
    pub interval2: TimeInterval,
    /// Short-duration early-time relative error.
    pub m1: f64,
    /// Long-duration late-time relative error.
    pub m2: f64,
}

fn restricted_error(reference: &Signal, component: &Signal, range: std::ops::Range<usize>) -> Result<f64> {
    let mut diff = 0.0;
    let mut denom = 0.0;
    for i in range {
        diff += (reference.samples()[i] - component.samples()[i]).norm_sqr();
        denom += reference.samples()[i].norm_sqr();
    }
    if denom == 0.0 {
        return Err(Error::UndefinedMetric(
            "reference signal has zero energy on the interval".into(),
        ));
    }
    Ok((diff / denom).sqrt())
}

/// Compute m1 and m2 for a separation `y ~ y1 + y2`.
///
/// When `reference` is given (the clean signal in noisy experiments), errors
/// are measured against it instead of the mixture.
pub fn interval_errors(
    y: &Signal,
    y1: &Signal,
    y2: &Signal,
    interval1: TimeInterval,
    interval2: TimeInterval,
    reference: Option<&Signal>,
) -> Result<IntervalMetrics> {
    let reference = reference.unwrap_or(y);
    for (name, s) in [("y1", y1), ("y2", y2), ("reference", reference)] {
        if s.len() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "{name} has length {}, expected {}",
                s.len(),
                y.len()
            )));
        }
        if s.sample_rate() != y.sample_rate() {
            return Err(Error::SampleRateMismatch { left: s.sample_rate(), right: y.sample_rate() });
        }
    }
    let duration = y.duration();
    for (name, iv) in [("I1", interval1), ("I2", interval2)] {
        if iv.end > duration + 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "{name} = [{}, {}) s extends beyond the {duration} s signal",
                iv.start, iv.end
            )));
        }
    }
    let r1 = interval1.sample_range(y.sample_rate(), y.len())?;
    let r2 = interval2.sample_range(y.sample_rate(), y.len())?;
    Ok(IntervalMetrics {
        interval1,
        interval2,
        m1: restricted_error(reference, y1, r1)?,
        m2: restricted_error(reference, y2, r2)?,
    })
}

/// Mean and (population) standard deviation of a sequence.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
    (mean, var.sqrt())
}
