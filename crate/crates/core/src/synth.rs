//! Analytic test-signal generators with exact ground-truth decompositions.
//!
//! Every generator returns the mixture together with the components it was
//! built from, so separation quality can be scored against known truth. The
//! mixture is formed by summing the emitted components sample by sample,
//! which makes the additivity exact at the bit level.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Spike-plus-sinusoid mixture and its exact components.
#[derive(Debug, Clone)]
pub struct SpikePlusSine {
    pub mixture: Signal,
    pub spike: Signal,
    pub sine: Signal,
}

/// `y[n] = delta_{spike_index}[n] + sin(2 pi tone_freq n / f_s)` with unit
/// amplitudes.
pub fn spike_plus_sine(n: usize, sample_rate: f64, spike_index: usize, tone_freq: f64) -> Result<SpikePlusSine> {
    spike_plus_sine_scaled(n, sample_rate, spike_index, tone_freq, 1.0, 1.0)
}

/// Spike-plus-sinusoid with explicit component amplitudes.
pub fn spike_plus_sine_scaled(
    n: usize,
    sample_rate: f64,
    spike_index: usize,
    tone_freq: f64,
    spike_amplitude: f64,
    tone_amplitude: f64,
) -> Result<SpikePlusSine> {
    if n == 0 {
        return Err(Error::InvalidDimension("spike_plus_sine requires N >= 1".into()));
    }
    if spike_index >= n {
        return Err(Error::InvalidParameter(format!(
            "spike index {spike_index} out of range for N = {n}"
        )));
    }
    if !(tone_freq > 0.0) || tone_freq >= sample_rate / 2.0 {
        return Err(Error::InvalidParameter(format!(
            "tone frequency {tone_freq} Hz must lie in (0, f_s/2)"
        )));
    }
    let mut spike = vec![Complex64::new(0.0, 0.0); n];
    spike[spike_index] = Complex64::new(spike_amplitude, 0.0);
    let sine: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(tone_amplitude * (2.0 * PI * tone_freq * i as f64 / sample_rate).sin(), 0.0))
        .collect();
    let mixture: Vec<Complex64> = spike.iter().zip(sine.iter()).map(|(a, b)| a + b).collect();
    Ok(SpikePlusSine {
        mixture: Signal::new(mixture, sample_rate)?,
        spike: Signal::new(spike, sample_rate)?,
        sine: Signal::new(sine, sample_rate)?,
    })
}

/// Parameters of the driven, damped harmonic oscillator
/// `y'' + (2/tau) y' + (2 pi f0)^2 y = forcing_amplitude * sin(2 pi f t)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OscillatorSpec {
    /// Decay constant of the transient, seconds.
    pub tau: f64,
    /// Natural frequency, Hz.
    pub f0: f64,
    /// Drive frequency, Hz.
    pub f: f64,
    /// Amplitude of the sinusoidal drive.
    pub forcing_amplitude: f64,
    pub sample_rate: f64,
    pub n: usize,
}

impl OscillatorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !(self.f0 > 0.0) || !(self.f > 0.0) {
            return Err(Error::InvalidParameter(
                "oscillator requires tau > 0, f0 > 0, f > 0".into(),
            ));
        }
        if !(self.sample_rate > 0.0) || self.n == 0 {
            return Err(Error::InvalidParameter("oscillator requires f_s > 0 and N >= 1".into()));
        }
        if 2.0 * PI * self.f0 <= 1.0 / self.tau {
            return Err(Error::UnsupportedRegime(format!(
                "oscillator must be underdamped: need 2*pi*f0 > 1/tau, got f0 = {} Hz, tau = {} s",
                self.f0, self.tau
            )));
        }
        Ok(())
    }
}

/// Zero-state oscillator response split into its transient and steady state.
#[derive(Debug, Clone)]
pub struct DrivenOscillator {
    /// Sampled zero-state solution (`homogeneous + particular`).
    pub total: Signal,
    /// Exponentially damped sinusoid chosen so `y(0) = y'(0) = 0`.
    pub homogeneous: Signal,
    /// Steady-state sinusoid of the closed-form particular solution.
    pub particular: Signal,
}

/// Closed-form zero-state solution of the driven oscillator.
///
/// The particular part is `Im(Y e^{j w t})` with
/// `Y = a / (w0^2 - w^2 + 2 j w / tau)`; the homogeneous part is the damped
/// sinusoid that cancels the particular part's value and slope at `t = 0`.
pub fn driven_oscillator(spec: &OscillatorSpec) -> Result<DrivenOscillator> {
    spec.validate()?;
    let w = 2.0 * PI * spec.f;
    let w0 = 2.0 * PI * spec.f0;
    let decay = 1.0 / spec.tau;
    let wd = (w0 * w0 - decay * decay).sqrt();

    let response = Complex64::new(spec.forcing_amplitude, 0.0)
        / Complex64::new(w0 * w0 - w * w, 2.0 * w / spec.tau);

    // zero total initial conditions
    let c1 = -response.im;
    let c2 = (c1 * decay - w * response.re) / wd;

    let mut homogeneous = Vec::with_capacity(spec.n);
    let mut particular = Vec::with_capacity(spec.n);
    let mut total = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let t = i as f64 / spec.sample_rate;
        let p = (response * Complex64::from_polar(1.0, w * t)).im;
        let h = (-t * decay).exp() * (c1 * (wd * t).cos() + c2 * (wd * t).sin());
        particular.push(Complex64::new(p, 0.0));
        homogeneous.push(Complex64::new(h, 0.0));
        total.push(Complex64::new(h + p, 0.0));
    }
    Ok(DrivenOscillator {
        total: Signal::new(total, spec.sample_rate)?,
        homogeneous: Signal::new(homogeneous, spec.sample_rate)?,
        particular: Signal::new(particular, spec.sample_rate)?,
    })
}

/// Short broadband pulse: a rectangular-windowed linear sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PulseSpec {
    /// Arrival time, seconds.
    pub arrival: f64,
    /// Duration, seconds.
    pub duration: f64,
    /// Swept band (low, high), Hz.
    pub band: (f64, f64),
    pub amplitude: f64,
}

/// Delayed short-duration arrival: a rectangular-windowed tone burst.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WavepacketSpec {
    pub arrival: f64,
    pub duration: f64,
    pub center_freq: f64,
    pub amplitude: f64,
}

/// Long-duration mode: a one-sided exponentially decaying sinusoid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResonanceSpec {
    pub frequency: f64,
    /// Decay constant, seconds.
    pub decay: f64,
    pub amplitude: f64,
    pub start: f64,
}

/// Synthetic elastic-target description with exact short/long ground truth.
///
/// Stands in for a physical frequency-domain scattering model: the pulse and
/// wavepackets form the short-duration component, the resonances the
/// long-duration one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticTargetSpec {
    pub pulse: Option<PulseSpec>,
    pub wavepackets: Vec<WavepacketSpec>,
    pub resonances: Vec<ResonanceSpec>,
    pub sample_rate: f64,
    pub n: usize,
}

impl SyntheticTargetSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate > 0.0) || self.n == 0 {
            return Err(Error::InvalidParameter("target requires f_s > 0 and N >= 1".into()));
        }
        let duration = self.n as f64 / self.sample_rate;
        let check_arrival = |t: f64, what: &str| {
            if !(0.0..duration).contains(&t) {
                return Err(Error::InvalidParameter(format!(
                    "{what} arrival {t} s outside [0, {duration}) s"
                )));
            }
            Ok(())
        };
        if let Some(p) = &self.pulse {
            check_arrival(p.arrival, "pulse")?;
        }
        for w in &self.wavepackets {
            check_arrival(w.arrival, "wavepacket")?;
        }
        for r in &self.resonances {
            check_arrival(r.start, "resonance")?;
            if !(r.decay > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "resonance decay constant must be positive, got {}",
                    r.decay
                )));
            }
        }
        Ok(())
    }

    /// Desk-scale default: one pulse, two wavepackets and four resonances in
    /// a 20 ms record. Event frequencies sit on the DFT grid, short-event
    /// durations match small rectangular windows, and the ring-down onsets
    /// trail the geometric returns.
    pub fn desk_default() -> Self {
        Self {
            pulse: Some(PulseSpec {
                arrival: 1.32e-3,
                duration: 0.4e-3,
                band: (5_000.0, 8_000.0),
                amplitude: 1.0,
            }),
            wavepackets: vec![
                WavepacketSpec { arrival: 1.48e-3, duration: 0.2e-3, center_freq: 7_000.0, amplitude: 0.45 },
                WavepacketSpec { arrival: 1.64e-3, duration: 0.12e-3, center_freq: 5_500.0, amplitude: 0.30 },
            ],
            resonances: vec![
                ResonanceSpec { frequency: 3_000.0, decay: 2.0e-3, amplitude: 0.40, start: 2.08e-3 },
                ResonanceSpec { frequency: 4_500.0, decay: 3.5e-3, amplitude: 0.30, start: 2.16e-3 },
                ResonanceSpec { frequency: 6_500.0, decay: 6.0e-3, amplitude: 0.25, start: 2.24e-3 },
                ResonanceSpec { frequency: 8_000.0, decay: 10.0e-3, amplitude: 0.18, start: 2.32e-3 },
            ],
            sample_rate: 25_000.0,
            n: 500,
        }
    }

    /// Rectangular window durations matching this spec's short events.
    pub fn short_window_durations(&self) -> Vec<f64> {
        let mut durations: Vec<f64> = self
            .pulse
            .iter()
            .map(|p| p.duration)
            .chain(self.wavepackets.iter().map(|w| w.duration))
            .collect();
        durations.sort_by(f64::total_cmp);
        durations.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        durations
    }

    /// Exponential time constants matching this spec's resonances.
    pub fn long_time_constants(&self) -> Vec<f64> {
        let mut taus: Vec<f64> = self.resonances.iter().map(|r| r.decay).collect();
        taus.sort_by(f64::total_cmp);
        taus.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        taus
    }
}

/// Synthetic target realization with exact component truth.
#[derive(Debug, Clone)]
pub struct ElasticTarget {
    pub total: Signal,
    /// Pulse plus wavepackets.
    pub short_truth: Signal,
    /// Sum of the decaying sinusoids.
    pub long_truth: Signal,
}

/// Render a [`SyntheticTargetSpec`] into sampled components and mixture.
pub fn synthetic_elastic_target(spec: &SyntheticTargetSpec) -> Result<ElasticTarget> {
    spec.validate()?;
    let n = spec.n;
    let fs = spec.sample_rate;
    let mut short = vec![Complex64::new(0.0, 0.0); n];
    let mut long = vec![Complex64::new(0.0, 0.0); n];

    if let Some(p) = &spec.pulse {
        let sweep_rate = (p.band.1 - p.band.0) / p.duration;
        for i in 0..n {
            let t = i as f64 / fs - p.arrival;
            if (0.0..p.duration).contains(&t) {
                let phase = 2.0 * PI * (p.band.0 * t + 0.5 * sweep_rate * t * t);
                short[i].re += p.amplitude * phase.sin();
            }
        }
    }
    for w in &spec.wavepackets {
        for i in 0..n {
            let t = i as f64 / fs - w.arrival;
            if (0.0..w.duration).contains(&t) {
                short[i].re += w.amplitude * (2.0 * PI * w.center_freq * t).sin();
            }
        }
    }
    for r in &spec.resonances {
        for i in 0..n {
            let t = i as f64 / fs - r.start;
            if t >= 0.0 {
                long[i].re += r.amplitude * (-t / r.decay).exp() * (2.0 * PI * r.frequency * t).sin();
            }
        }
    }

    let total: Vec<Complex64> = short.iter().zip(long.iter()).map(|(a, b)| a + b).collect();
    Ok(ElasticTarget {
        total: Signal::new(total, fs)?,
        short_truth: Signal::new(short, fs)?,
        long_truth: Signal::new(long, fs)?,
    })
}

/// Real linear-frequency-modulated pulse sweeping `f_start -> f_end` over
/// `duration` seconds. Down-sweeps are allowed.
pub fn lfm_chirp(f_start: f64, f_end: f64, duration: f64, sample_rate: f64) -> Result<Signal> {
    if !(duration > 0.0) {
        return Err(Error::InvalidParameter(format!("chirp duration must be positive, got {duration}")));
    }
    let nyquist = sample_rate / 2.0;
    if !(f_start >= 0.0 && f_end >= 0.0) || f_start.max(f_end) >= nyquist {
        return Err(Error::InvalidParameter(format!(
            "chirp band [{f_start}, {f_end}] Hz must lie within [0, {nyquist}) Hz"
        )));
    }
    let n = (duration * sample_rate).round() as usize;
    if n == 0 {
        return Err(Error::InvalidParameter("chirp shorter than one sample".into()));
    }
    let sweep_rate = (f_end - f_start) / duration;
    let samples: Vec<Complex64> = (0..n)
        .map(|i| {
            let t = i as f64 / sample_rate;
            let phase = 2.0 * PI * (f_start * t + 0.5 * sweep_rate * t * t);
            Complex64::new(phase.sin(), 0.0)
        })
        .collect();
    Signal::new(samples, sample_rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spike_plus_sine_matches_reference_setup() {
        let out = spike_plus_sine(1000, 10_000.0, 50, 1000.0).unwrap();
        assert_eq!(out.mixture.len(), 1000);
        assert_eq!(out.spike.samples()[50].re, 1.0);
        // mixture is exactly the component sum
        for i in 0..1000 {
            assert_eq!(
                out.mixture.samples()[i],
                out.spike.samples()[i] + out.sine.samples()[i]
            );
        }
    }

    #[test]
    fn spike_plus_sine_degenerate_amplitudes() {
        let pure_sine = spike_plus_sine_scaled(256, 8000.0, 10, 500.0, 0.0, 1.0).unwrap();
        assert_eq!(pure_sine.spike.norm(), 0.0);
        assert_eq!(pure_sine.mixture.samples(), pure_sine.sine.samples());
        let pure_spike = spike_plus_sine_scaled(256, 8000.0, 10, 500.0, 1.0, 0.0).unwrap();
        assert_eq!(pure_spike.sine.norm(), 0.0);
        assert_eq!(pure_spike.mixture.samples(), pure_spike.spike.samples());
    }

    #[test]
    fn spike_plus_sine_rejects_bad_parameters() {
        assert!(spike_plus_sine(100, 1000.0, 100, 100.0).is_err());
        assert!(spike_plus_sine(100, 1000.0, 0, 600.0).is_err());
    }

    #[test]
    fn oscillator_zero_state_initial_conditions() {
        let spec = OscillatorSpec {
            tau: 2e-3,
            f0: 20_000.0,
            f: 15_000.0,
            forcing_amplitude: 1e10,
            sample_rate: 100_000.0,
            n: 1000,
        };
        let out = driven_oscillator(&spec).unwrap();
        assert!(out.total.samples()[0].re.abs() < 1e-9 * out.total.norm());
        for i in 0..spec.n {
            assert_eq!(
                out.total.samples()[i],
                out.homogeneous.samples()[i] + out.particular.samples()[i]
            );
        }
    }

    #[test]
    fn oscillator_with_zero_forcing_is_silent() {
        let spec = OscillatorSpec {
            tau: 2e-3,
            f0: 20_000.0,
            f: 15_000.0,
            forcing_amplitude: 0.0,
            sample_rate: 100_000.0,
            n: 128,
        };
        let out = driven_oscillator(&spec).unwrap();
        assert_eq!(out.total.norm(), 0.0);
        assert_eq!(out.homogeneous.norm(), 0.0);
        assert_eq!(out.particular.norm(), 0.0);
    }

    #[test]
    fn oscillator_rejects_overdamped_regime() {
        let spec = OscillatorSpec {
            tau: 1e-6,
            f0: 10.0,
            f: 5.0,
            forcing_amplitude: 1.0,
            sample_rate: 1000.0,
            n: 16,
        };
        assert!(matches!(driven_oscillator(&spec), Err(Error::UnsupportedRegime(_))));
    }

    #[test]
    fn elastic_target_components_are_exactly_additive() {
        let spec = SyntheticTargetSpec::desk_default();
        let target = synthetic_elastic_target(&spec).unwrap();
        for i in 0..spec.n {
            assert_eq!(
                target.total.samples()[i],
                target.short_truth.samples()[i] + target.long_truth.samples()[i]
            );
        }
    }

    #[test]
    fn elastic_target_degenerate_specs() {
        let mut spec = SyntheticTargetSpec::desk_default();
        spec.resonances.clear();
        let no_long = synthetic_elastic_target(&spec).unwrap();
        assert_eq!(no_long.long_truth.norm(), 0.0);

        let single = SyntheticTargetSpec {
            pulse: None,
            wavepackets: vec![],
            resonances: vec![ResonanceSpec { frequency: 1000.0, decay: 2e-3, amplitude: 1.0, start: 1e-3 }],
            sample_rate: 25_000.0,
            n: 250,
        };
        let out = synthetic_elastic_target(&single).unwrap();
        assert_eq!(out.short_truth.norm(), 0.0);
        assert_eq!(out.total.samples(), out.long_truth.samples());
    }

    #[test]
    fn chirp_lengths_and_limits() {
        let c = lfm_chirp(15_000.0, 45_000.0, 1e-3, 300_000.0).unwrap();
        assert_eq!(c.len(), 300);
        let down = lfm_chirp(30_000.0, 10_000.0, 1e-3, 100_000.0).unwrap();
        assert_eq!(down.len(), 100);
        assert!(lfm_chirp(15_000.0, 60_000.0, 1e-3, 100_000.0).is_err());
        assert!(lfm_chirp(100.0, 200.0, 0.0, 1000.0).is_err());
    }

    #[test]
    fn constant_frequency_chirp_is_a_tone() {
        let fs = 10_000.0;
        let tone = lfm_chirp(1000.0, 1000.0, 0.01, fs).unwrap();
        for (i, s) in tone.samples().iter().enumerate() {
            let expected = (2.0 * PI * 1000.0 * i as f64 / fs).sin();
            assert!((s.re - expected).abs() < 1e-12);
        }
    }
}
