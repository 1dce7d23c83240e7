//! Enveloped-sinusoid tight frames.
//!
//! Given L nonzero envelopes `e_l` of length N, the frame vectors
//!
//! ```text
//! a_{l,k,m}[n] = e_l[(n - m) mod N] * exp(2*pi*j*k*(n - m)/N)
//! ```
//!
//! over all frequencies `k` and cyclic shifts `m` form a tight frame with
//! constant `p = N * sum_l ||e_l||^2`. Scaling every envelope to
//! `||e_l|| = (N*L)^{-1/2}` yields a Parseval frame (`p = 1`).
//!
//! Both transforms are FFT-diagonalized: with `F` the (unnormalized) DFT,
//! `S^k` the cyclic delay by `k` and `H` the conjugate flip, the analysis
//! rows are `c_{k,l} = F^{-1} D(S^k F H e_l) F w` and synthesis accumulates
//! `F^{-1} sum_{l,k} D(S^k F e_l) F c_{k,l}`. A dense reference path computed
//! straight from the frame-vector definition is kept alongside for
//! verification at small N.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::signal::Signal;

/// Maximum coefficient-array size (`L * N * N`) accepted by default.
///
/// The frames are massively overdetermined; refusing absurd sizes up front
/// beats thrashing. Use [`EspFrame::with_coefficient_cap`] to raise it.
pub const DEFAULT_COEFF_CAP: usize = 1 << 28;

/// How an envelope was generated; retained for serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EnvelopeKind {
    /// Ones over the first `round(duration * f_s)` samples.
    Rectangular { duration: f64 },
    /// `exp(-n / (time_constant * f_s))` over the full length.
    Exponential { time_constant: f64 },
    /// Arbitrary user-supplied samples.
    Raw,
}

/// A set of L nonzero envelope vectors, each of length N.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSet {
    envelopes: Vec<Vec<Complex64>>,
    kinds: Vec<EnvelopeKind>,
    labels: Vec<String>,
    sample_rate: f64,
}

impl EnvelopeSet {
    /// Rectangular windows of the given durations (seconds).
    ///
    /// Sample counts use round-half-away-from-zero on `duration * f_s` so
    /// envelope lengths are deterministic across platforms.
    pub fn rectangular(durations: &[f64], sample_rate: f64, n: usize) -> Result<Self> {
        check_env_dims(durations.len(), sample_rate, n)?;
        let mut envelopes = Vec::with_capacity(durations.len());
        let mut kinds = Vec::with_capacity(durations.len());
        let mut labels = Vec::with_capacity(durations.len());
        for &duration in durations {
            let samples = (duration * sample_rate).round();
            if !(samples >= 1.0) {
                return Err(Error::InvalidEnvelope(format!(
                    "rectangular window of {duration} s rounds to zero samples at {sample_rate} Hz"
                )));
            }
            let samples = samples as usize;
            if samples > n {
                return Err(Error::InvalidEnvelope(format!(
                    "rectangular window of {duration} s needs {samples} samples but N = {n}"
                )));
            }
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            for v in e.iter_mut().take(samples) {
                *v = Complex64::new(1.0, 0.0);
            }
            envelopes.push(e);
            kinds.push(EnvelopeKind::Rectangular { duration });
            labels.push(format!("rect {:.4} ms", duration * 1e3));
        }
        Ok(Self { envelopes, kinds, labels, sample_rate })
    }

    /// Exponentially decaying envelopes with the given time constants (seconds).
    pub fn exponential(time_constants: &[f64], sample_rate: f64, n: usize) -> Result<Self> {
        check_env_dims(time_constants.len(), sample_rate, n)?;
        let mut envelopes = Vec::with_capacity(time_constants.len());
        let mut kinds = Vec::with_capacity(time_constants.len());
        let mut labels = Vec::with_capacity(time_constants.len());
        for &tau in time_constants {
            if !(tau > 0.0) || !tau.is_finite() {
                return Err(Error::InvalidEnvelope(format!(
                    "exponential time constant must be positive and finite, got {tau}"
                )));
            }
            let rate = 1.0 / (tau * sample_rate);
            let e: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new((-(i as f64) * rate).exp(), 0.0))
                .collect();
            envelopes.push(e);
            kinds.push(EnvelopeKind::Exponential { time_constant: tau });
            labels.push(format!("exp {:.4} ms", tau * 1e3));
        }
        Ok(Self { envelopes, kinds, labels, sample_rate })
    }

    /// Arbitrary envelopes; every vector must be nonzero and share a length.
    pub fn raw(envelopes: Vec<Vec<Complex64>>, sample_rate: f64) -> Result<Self> {
        if envelopes.is_empty() {
            return Err(Error::InvalidEnvelope("envelope set must contain L >= 1 envelopes".into()));
        }
        let n = envelopes[0].len();
        check_env_dims(envelopes.len(), sample_rate, n)?;
        for (l, e) in envelopes.iter().enumerate() {
            if e.len() != n {
                return Err(Error::InvalidEnvelope(format!(
                    "envelope {l} has length {} but envelope 0 has length {n}",
                    e.len()
                )));
            }
            if e.iter().all(|v| v.norm_sqr() == 0.0) {
                return Err(Error::InvalidEnvelope(format!("envelope {l} is identically zero")));
            }
        }
        let count = envelopes.len();
        Ok(Self {
            envelopes,
            kinds: vec![EnvelopeKind::Raw; count],
            labels: (0..count).map(|l| format!("raw {l}")).collect(),
            sample_rate,
        })
    }

    /// Number of envelopes L.
    pub fn len(&self) -> usize {
        self.envelopes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // L >= 1 enforced at construction
    }

    /// Signal dimension N.
    pub fn signal_dim(&self) -> usize {
        self.envelopes[0].len()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn envelopes(&self) -> &[Vec<Complex64>] {
        &self.envelopes
    }

    pub fn kinds(&self) -> &[EnvelopeKind] {
        &self.kinds
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Rescale every envelope to `||e_l|| = (N*L)^{-1/2}` so the resulting
    /// frame is Parseval (`p = 1`).
    pub fn normalize_parseval(&self) -> Result<EnvelopeSet> {
        let n = self.signal_dim() as f64;
        let l = self.len() as f64;
        let target = 1.0 / (n * l).sqrt();
        let mut out = self.clone();
        for (idx, e) in out.envelopes.iter_mut().enumerate() {
            let norm = e.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::InvalidEnvelope(format!("envelope {idx} is identically zero")));
            }
            let scale = target / norm;
            for v in e.iter_mut() {
                *v *= scale;
            }
        }
        Ok(out)
    }

    /// Serializable description; envelope samples are always included and are
    /// authoritative on re-ingest.
    pub fn to_spec(&self) -> EnvelopeSetSpec {
        EnvelopeSetSpec {
            n: self.signal_dim(),
            sample_rate: self.sample_rate,
            envelopes: self
                .envelopes
                .iter()
                .zip(self.kinds.iter())
                .zip(self.labels.iter())
                .map(|((e, kind), label)| EnvelopeEntrySpec {
                    kind: kind.clone(),
                    label: Some(label.clone()),
                    samples: Some(e.iter().map(|v| (v.re, v.im)).collect()),
                })
                .collect(),
        }
    }

    /// Rebuild a set from its serialized description. Entries carrying
    /// samples use them verbatim; entries with only a kind are regenerated.
    pub fn from_spec(spec: &EnvelopeSetSpec) -> Result<Self> {
        if spec.envelopes.is_empty() {
            return Err(Error::InvalidEnvelope("envelope set must contain L >= 1 envelopes".into()));
        }
        let mut envelopes = Vec::with_capacity(spec.envelopes.len());
        let mut kinds = Vec::with_capacity(spec.envelopes.len());
        let mut labels = Vec::with_capacity(spec.envelopes.len());
        for (idx, entry) in spec.envelopes.iter().enumerate() {
            let e = match (&entry.samples, &entry.kind) {
                (Some(samples), _) => {
                    if samples.len() != spec.n {
                        return Err(Error::InvalidEnvelope(format!(
                            "envelope {idx} has {} samples, expected N = {}",
                            samples.len(),
                            spec.n
                        )));
                    }
                    samples.iter().map(|&(re, im)| Complex64::new(re, im)).collect()
                }
                (None, EnvelopeKind::Rectangular { duration }) => {
                    EnvelopeSet::rectangular(&[*duration], spec.sample_rate, spec.n)?.envelopes.remove(0)
                }
                (None, EnvelopeKind::Exponential { time_constant }) => {
                    EnvelopeSet::exponential(&[*time_constant], spec.sample_rate, spec.n)?
                        .envelopes
                        .remove(0)
                }
                (None, EnvelopeKind::Raw) => {
                    return Err(Error::InvalidEnvelope(format!(
                        "raw envelope {idx} carries no samples"
                    )));
                }
            };
            if e.iter().all(|v: &Complex64| v.norm_sqr() == 0.0) {
                return Err(Error::InvalidEnvelope(format!("envelope {idx} is identically zero")));
            }
            kinds.push(entry.kind.clone());
            labels.push(entry.label.clone().unwrap_or_else(|| format!("envelope {idx}")));
            envelopes.push(e);
        }
        check_env_dims(envelopes.len(), spec.sample_rate, spec.n)?;
        Ok(Self { envelopes, kinds, labels, sample_rate: spec.sample_rate })
    }
}

fn check_env_dims(l: usize, sample_rate: f64, n: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::InvalidEnvelope("envelope set must contain L >= 1 envelopes".into()));
    }
    if n == 0 {
        return Err(Error::InvalidDimension("envelopes require N >= 1".into()));
    }
    if !(sample_rate > 0.0) || !sample_rate.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sample rate must be positive and finite, got {sample_rate}"
        )));
    }
    Ok(())
}

/// JSON description of an envelope set: `{n, sample_rate, envelopes: [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvelopeSetSpec {
    pub n: usize,
    pub sample_rate: f64,
    pub envelopes: Vec<EnvelopeEntrySpec>,
}

/// One envelope entry: generation kind plus optional explicit samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvelopeEntrySpec {
    #[serde(flatten)]
    pub kind: EnvelopeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<(f64, f64)>>,
}

/// Coefficients of an enveloped-sinusoid frame, shaped `(L, N, N)` and
/// indexed by (envelope `l`, frequency `k`, shift `m`).
#[derive(Debug, Clone)]
pub struct EspCoefficients {
    values: Vec<Complex64>,
    num_envelopes: usize,
    signal_dim: usize,
}

impl EspCoefficients {
    pub fn from_values(values: Vec<Complex64>, num_envelopes: usize, signal_dim: usize) -> Result<Self> {
        let expected = num_envelopes
            .checked_mul(signal_dim)
            .and_then(|v| v.checked_mul(signal_dim))
            .ok_or_else(|| Error::InvalidDimension("coefficient shape overflows usize".into()))?;
        if values.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "coefficient vector has {} values, expected L*N*N = {expected}",
                values.len()
            )));
        }
        Ok(Self { values, num_envelopes, signal_dim })
    }

    /// Shape as (L, N, N).
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.num_envelopes, self.signal_dim, self.signal_dim)
    }

    #[inline]
    pub fn index(&self, l: usize, k: usize, m: usize) -> usize {
        (l * self.signal_dim + k) * self.signal_dim + m
    }

    pub fn get(&self, l: usize, k: usize, m: usize) -> Complex64 {
        self.values[self.index(l, k, m)]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }
}

/// Cyclic delay by `k` samples: `out[i] = v[(i - k) mod N]`.
pub fn cyclic_shift(v: &[Complex64], k: i64) -> Vec<Complex64> {
    let n = v.len() as i64;
    (0..n).map(|i| v[(i - k).rem_euclid(n) as usize]).collect()
}

/// Conjugate flip `H`: `out[i] = conj(v[(N - i) mod N])`; an involution.
pub fn conjugate_flip(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    (0..n).map(|i| v[(n - i) % n].conj()).collect()
}

/// Enveloped-sinusoid tight frame with precomputed envelope spectra.
pub struct EspFrame {
    envelopes: EnvelopeSet,
    n: usize,
    l: usize,
    frame_constant: f64,
    /// `F e_l` per envelope, reused across all k via index rotation.
    env_spectra: Vec<Vec<Complex64>>,
    /// `F H e_l` per envelope, pre-divided by N to fold in the inverse-DFT
    /// scaling of the analysis rows.
    flip_spectra_over_n: Vec<Vec<Complex64>>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for EspFrame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EspFrame")
            .field("n", &self.n)
            .field("l", &self.l)
            .field("frame_constant", &self.frame_constant)
            .finish()
    }
}

impl EspFrame {
    pub fn new(envelopes: EnvelopeSet) -> Result<Self> {
        Self::with_coefficient_cap(envelopes, DEFAULT_COEFF_CAP)
    }

    /// Build a frame, refusing coefficient arrays larger than `cap` elements.
    pub fn with_coefficient_cap(envelopes: EnvelopeSet, cap: usize) -> Result<Self> {
        let n = envelopes.signal_dim();
        let l = envelopes.len();
        let required = l
            .checked_mul(n)
            .and_then(|v| v.checked_mul(n))
            .ok_or(Error::CoefficientCapExceeded { required: usize::MAX, cap })?;
        if required > cap {
            return Err(Error::CoefficientCapExceeded { required, cap });
        }

        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];

        let mut env_spectra = Vec::with_capacity(l);
        let mut flip_spectra_over_n = Vec::with_capacity(l);
        let inv_n = 1.0 / n as f64;
        let mut energy_sum = 0.0;
        for e in envelopes.envelopes() {
            energy_sum += e.iter().map(|v| v.norm_sqr()).sum::<f64>();
            let mut spec = e.clone();
            fft.process_with_scratch(&mut spec, &mut scratch);
            env_spectra.push(spec);
            let mut flip = conjugate_flip(e);
            fft.process_with_scratch(&mut flip, &mut scratch);
            for v in flip.iter_mut() {
                *v *= inv_n;
            }
            flip_spectra_over_n.push(flip);
        }

        Ok(Self {
            envelopes,
            n,
            l,
            frame_constant: n as f64 * energy_sum,
            env_spectra,
            flip_spectra_over_n,
            fft,
            ifft,
        })
    }

    pub fn envelope_set(&self) -> &EnvelopeSet {
        &self.envelopes
    }

    pub fn num_envelopes(&self) -> usize {
        self.l
    }

    /// Analysis returning shaped coefficients.
    pub fn analyze_signal(&self, w: &Signal) -> Result<EspCoefficients> {
        let values = self.analyze(w.samples())?;
        EspCoefficients::from_values(values, self.l, self.n)
    }

    /// Synthesis from shaped coefficients; the sampling rate is taken from
    /// the envelope set.
    pub fn synthesize_signal(&self, coeffs: &EspCoefficients) -> Result<Signal> {
        let samples = self.synthesize(coeffs.values())?;
        Signal::new(samples, self.envelopes.sample_rate())
    }

    /// Dense frame vector `a_{l,k,m}`, built straight from the definition.
    pub fn atom(&self, l: usize, k: usize, m: usize) -> Vec<Complex64> {
        let n = self.n;
        let e = &self.envelopes.envelopes()[l];
        let step = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        (0..n)
            .map(|i| {
                let q = (i + n - m % n) % n; // (i - m) mod N
                e[q] * Complex64::from_polar(1.0, step * q as f64)
            })
            .collect()
    }

    /// Dense analysis: inner products against every frame vector. O(L*N^3);
    /// reference path for verification at small N.
    pub fn analyze_dense(&self, w: &[Complex64]) -> Result<Vec<Complex64>> {
        if w.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "dense analysis: signal length {}, frame expects {}",
                w.len(),
                self.n
            )));
        }
        let n = self.n;
        let twiddle: Vec<Complex64> = (0..n)
            .map(|q| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * q as f64 / n as f64))
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeff_dim()];
        for l in 0..self.l {
            let e = &self.envelopes.envelopes()[l];
            for k in 0..n {
                for m in 0..n {
                    // c = <w, a_{l,k,m}> = sum_n w[n] conj(e[(n-m) mod N]) exp(-2 pi j k (n-m)/N)
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..n {
                        let q = (i + n - m) % n;
                        acc += w[i] * e[q].conj() * twiddle[(k * q) % n];
                    }
                    out[(l * n + k) * n + m] = acc;
                }
            }
        }
        Ok(out)
    }

    /// Dense synthesis: coefficient-weighted sum of frame vectors. O(L*N^3).
    pub fn synthesize_dense(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        if coeffs.len() != self.coeff_dim() {
            return Err(Error::DimensionMismatch(format!(
                "dense synthesis: coefficient length {}, frame expects {}",
                coeffs.len(),
                self.coeff_dim()
            )));
        }
        let n = self.n;
        let twiddle: Vec<Complex64> = (0..n)
            .map(|q| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * q as f64 / n as f64))
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for l in 0..self.l {
            let e = &self.envelopes.envelopes()[l];
            for k in 0..n {
                for m in 0..n {
                    let c = coeffs[(l * n + k) * n + m];
                    if c == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for i in 0..n {
                        let q = (i + n - m) % n;
                        out[i] += c * e[q] * twiddle[(k * q) % n];
                    }
                }
            }
        }
        Ok(out)
    }
}

impl Frame for EspFrame {
    fn signal_dim(&self) -> usize {
        self.n
    }

    fn coeff_dim(&self) -> usize {
        self.l * self.n * self.n
    }

    fn frame_constant(&self) -> f64 {
        self.frame_constant
    }

    fn id(&self) -> String {
        format!("esp(L={},N={})", self.l, self.n)
    }

    fn analyze_into(&self, signal: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        if signal.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "esp analyze: signal length {}, frame expects {}",
                signal.len(),
                self.n
            )));
        }
        if out.len() != self.coeff_dim() {
            return Err(Error::DimensionMismatch(format!(
                "esp analyze: output length {}, frame expects {}",
                out.len(),
                self.coeff_dim()
            )));
        }
        let n = self.n;

        let mut spectrum = signal.to_vec();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        self.fft.process_with_scratch(&mut spectrum, &mut scratch);

        // Row (l, k) is independent of every other row; the parallel split is
        // over rows, so results do not depend on the worker count.
        let ifft = &self.ifft;
        let flip_spectra = &self.flip_spectra_over_n;
        let spectrum = &spectrum;
        out.par_chunks_mut(n).enumerate().for_each_init(
            || vec![Complex64::new(0.0, 0.0); ifft.get_inplace_scratch_len()],
            |scratch, (row, chunk)| {
                let l = row / n;
                let k = row % n;
                // (S^k v)[f] = v[(f - k) mod N] as two contiguous runs
                let (head, tail) = flip_spectra[l].split_at(n - k);
                for f in 0..k {
                    chunk[f] = tail[f] * spectrum[f];
                }
                for f in k..n {
                    chunk[f] = head[f - k] * spectrum[f];
                }
                ifft.process_with_scratch(chunk, scratch);
            },
        );
        Ok(())
    }

    fn synthesize_into(&self, coeffs: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        if coeffs.len() != self.coeff_dim() {
            return Err(Error::DimensionMismatch(format!(
                "esp synthesize: coefficient length {}, frame expects {}",
                coeffs.len(),
                self.coeff_dim()
            )));
        }
        if out.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "esp synthesize: output length {}, frame expects {}",
                out.len(),
                self.n
            )));
        }
        let n = self.n;
        let inv_n = 1.0 / n as f64;
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        let mut row_buf = vec![Complex64::new(0.0, 0.0); n];
        let mut acc = vec![Complex64::new(0.0, 0.0); n];

        // Accumulation runs in fixed (l, k) order so the result is exactly
        // reproducible regardless of available parallelism.
        for l in 0..self.l {
            let env_spec = &self.env_spectra[l];
            for k in 0..n {
                row_buf.copy_from_slice(&coeffs[(l * n + k) * n..(l * n + k + 1) * n]);
                self.fft.process_with_scratch(&mut row_buf, &mut scratch);
                let (head, tail) = env_spec.split_at(n - k);
                for f in 0..k {
                    acc[f] += tail[f] * row_buf[f];
                }
                for f in k..n {
                    acc[f] += head[f - k] * row_buf[f];
                }
            }
        }

        out.copy_from_slice(&acc);
        let mut iscratch = vec![Complex64::new(0.0, 0.0); self.ifft.get_inplace_scratch_len()];
        self.ifft.process_with_scratch(out, &mut iscratch);
        for v in out.iter_mut() {
            *v *= inv_n;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rectangular_sample_counts_match_rounding() {
        let fs = 300_000.0;
        let set = EnvelopeSet::rectangular(&[0.27e-3, 0.54e-3, 0.1e-3], fs, 300).unwrap();
        let lens: Vec<usize> = set
            .envelopes()
            .iter()
            .map(|e| e.iter().filter(|v| v.norm_sqr() > 0.0).count())
            .collect();
        assert_eq!(lens, vec![81, 162, 30]);
    }

    #[test]
    fn rectangular_full_and_single_sample_windows() {
        let set = EnvelopeSet::rectangular(&[8.0 / 100.0, 1.0 / 100.0], 100.0, 8).unwrap();
        assert!(set.envelopes()[0].iter().all(|v| *v == c(1.0, 0.0)));
        assert_eq!(set.envelopes()[1][0], c(1.0, 0.0));
        assert!(set.envelopes()[1][1..].iter().all(|v| *v == c(0.0, 0.0)));
    }

    #[test]
    fn rectangular_zero_length_rejected() {
        assert!(EnvelopeSet::rectangular(&[1e-9], 100.0, 8).is_err());
    }

    #[test]
    fn exponential_starts_at_one_and_flattens_for_huge_tau() {
        let n = 64;
        let fs = 1000.0;
        let set = EnvelopeSet::exponential(&[2e-3, 1e6 * n as f64 / fs], fs, n).unwrap();
        for e in set.envelopes() {
            assert_eq!(e[0], c(1.0, 0.0));
        }
        let flat = &set.envelopes()[1];
        let max_dev = flat.iter().map(|v| (v.re - 1.0).abs()).fold(0.0, f64::max);
        assert!(max_dev < 1e-3, "near-infinite tau should give a constant envelope, dev {max_dev}");
        assert!(EnvelopeSet::exponential(&[0.0], fs, n).is_err());
        assert!(EnvelopeSet::exponential(&[-1.0], fs, n).is_err());
    }

    #[test]
    fn parseval_normalization_hits_target_norm() {
        let n = 100;
        let set = EnvelopeSet::rectangular(&[n as f64 / 100.0], 100.0, n).unwrap();
        let norm_set = set.normalize_parseval().unwrap();
        // L = 1: ||e|| = N^{-1/2} = 0.1, so each of the 100 unit samples scales to 0.01
        let e = &norm_set.envelopes()[0];
        assert!((e[0].re - 0.01).abs() < 1e-15);
        let norm = e.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm - 0.1).abs() < 1e-12);

        let frame = EspFrame::new(norm_set).unwrap();
        assert!((frame.frame_constant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parseval_with_two_identical_envelopes() {
        let n = 16;
        let env = vec![vec![c(1.0, 0.0); n], vec![c(1.0, 0.0); n]];
        let set = EnvelopeSet::raw(env, 1.0).unwrap().normalize_parseval().unwrap();
        for e in set.envelopes() {
            let norm = e.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            assert!((norm - (2.0 * n as f64).powf(-0.5)).abs() < 1e-12);
        }
        let frame = EspFrame::new(set).unwrap();
        assert!((frame.frame_constant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frame_constant_matches_envelope_energy() {
        let n = 8;
        // constant envelope of ones: p = N * N = 64
        let ones = EnvelopeSet::raw(vec![vec![c(1.0, 0.0); n]], 1.0).unwrap();
        assert_eq!(EspFrame::new(ones).unwrap().frame_constant(), 64.0);
        // one-hot envelope: p = N * 1 = 8
        let mut hot = vec![c(0.0, 0.0); n];
        hot[0] = c(1.0, 0.0);
        let hot_set = EnvelopeSet::raw(vec![hot], 1.0).unwrap();
        assert_eq!(EspFrame::new(hot_set).unwrap().frame_constant(), 8.0);
    }

    #[test]
    fn coefficient_cap_is_enforced() {
        let set = EnvelopeSet::rectangular(&[0.5], 8.0, 8).unwrap();
        let err = EspFrame::with_coefficient_cap(set, 32).unwrap_err();
        assert!(matches!(err, Error::CoefficientCapExceeded { required: 64, cap: 32 }));
    }

    #[test]
    fn conjugate_flip_is_an_involution() {
        let v: Vec<Complex64> = (0..7).map(|i| c(i as f64, -(i as f64) * 0.3)).collect();
        assert_eq!(conjugate_flip(&conjugate_flip(&v)), v);
    }

    #[test]
    fn shift_cycles_back_to_identity() {
        let v: Vec<Complex64> = (0..6).map(|i| c(i as f64, 0.0)).collect();
        assert_eq!(cyclic_shift(&v, 6), v);
        assert_eq!(cyclic_shift(&cyclic_shift(&v, 2), -2), v);
        assert_eq!(cyclic_shift(&v, 1)[0], c(5.0, 0.0));
    }

    #[test]
    fn zero_signal_gives_zero_coefficients() {
        let set = EnvelopeSet::rectangular(&[0.25], 16.0, 16).unwrap();
        let frame = EspFrame::new(set).unwrap();
        let coeffs = frame.analyze(&vec![c(0.0, 0.0); 16]).unwrap();
        assert!(coeffs.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn constant_envelope_concentrates_tone_at_its_bin() {
        let n = 16;
        let set = EnvelopeSet::raw(vec![vec![c(1.0, 0.0); n]], 1.0).unwrap();
        let frame = EspFrame::new(set).unwrap();
        let tone: Vec<Complex64> = (0..n)
            .map(|i| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 5.0 * i as f64 / n as f64))
            .collect();
        let coeffs = frame.analyze(&tone).unwrap();
        let grid = EspCoefficients::from_values(coeffs, 1, n).unwrap();
        let at_k5: Vec<f64> = (0..n).map(|m| grid.get(0, 5, m).norm()).collect();
        let max_k5 = at_k5.iter().cloned().fold(0.0, f64::max);
        let min_k5 = at_k5.iter().cloned().fold(f64::INFINITY, f64::min);
        // shift-independent at the tone's own bin
        assert!((max_k5 - min_k5) < 1e-9 * max_k5);
        for k in 0..n {
            if k == 5 {
                continue;
            }
            for m in 0..n {
                assert!(
                    grid.get(0, k, m).norm() < 1e-9 * max_k5,
                    "unexpected energy at k={k}, m={m}"
                );
            }
        }
    }

    #[test]
    fn one_hot_coefficient_synthesizes_single_atom() {
        let n = 12;
        let set = EnvelopeSet::exponential(&[3.0 / 12.0], 12.0, n).unwrap();
        let frame = EspFrame::new(set).unwrap();
        let mut coeffs = vec![c(0.0, 0.0); frame.coeff_dim()];
        let (l, k, m) = (0, 7, 4);
        coeffs[(l * n + k) * n + m] = c(1.0, 0.0);
        let fast = frame.synthesize(&coeffs).unwrap();
        let atom = frame.atom(l, k, m);
        for (a, b) in fast.iter().zip(atom.iter()) {
            assert!((a - b).norm() < 1e-10, "fast synthesis should emit the dense atom");
        }
    }

    #[test]
    fn spec_round_trips_through_json() {
        let set = EnvelopeSet::exponential(&[1.78e-3, 3.16e-3], 300e3, 64)
            .unwrap()
            .normalize_parseval()
            .unwrap();
        let json = serde_json::to_string(&set.to_spec()).unwrap();
        let spec: EnvelopeSetSpec = serde_json::from_str(&json).unwrap();
        let back = EnvelopeSet::from_spec(&spec).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn spec_without_samples_regenerates_from_kind() {
        let spec = EnvelopeSetSpec {
            n: 32,
            sample_rate: 1000.0,
            envelopes: vec![EnvelopeEntrySpec {
                kind: EnvelopeKind::Rectangular { duration: 8.0 / 1000.0 },
                label: None,
                samples: None,
            }],
        };
        let set = EnvelopeSet::from_spec(&spec).unwrap();
        let nonzero = set.envelopes()[0].iter().filter(|v| v.norm() > 0.0).count();
        assert_eq!(nonzero, 8);
    }
}
