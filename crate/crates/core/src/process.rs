//! Pulse/response processing chain: convolution, matched filtering,
//! zero-phase Butterworth band limiting and calibrated noise injection.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

fn fft_forward(data: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(data.len());
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(data, &mut scratch);
}

fn fft_inverse(data: &mut [Complex64]) {
    let n = data.len();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(n);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(data, &mut scratch);
    let inv = 1.0 / n as f64;
    for v in data.iter_mut() {
        *v *= inv;
    }
}

fn check_rates(a: &Signal, b: &Signal) -> Result<()> {
    if a.sample_rate() != b.sample_rate() {
        return Err(Error::SampleRateMismatch { left: a.sample_rate(), right: b.sample_rate() });
    }
    Ok(())
}

/// Full linear convolution of an impulse response with an excitation;
/// output length is `N_ir + N_ex - 1`.
pub fn convolve_response(impulse_response: &Signal, excitation: &Signal) -> Result<Signal> {
    check_rates(impulse_response, excitation)?;
    let n_out = impulse_response.len() + excitation.len() - 1;
    let mut a = vec![Complex64::new(0.0, 0.0); n_out];
    let mut b = vec![Complex64::new(0.0, 0.0); n_out];
    a[..impulse_response.len()].copy_from_slice(impulse_response.samples());
    b[..excitation.len()].copy_from_slice(excitation.samples());
    fft_forward(&mut a);
    fft_forward(&mut b);
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x *= y;
    }
    fft_inverse(&mut a);
    Signal::new(a, impulse_response.sample_rate())
}

/// Correlate the received signal with a replica (convolution with the
/// conjugate time reverse).
///
/// The output has the received signal's length and is aligned so that a
/// replica embedded at delay `d` produces its peak at index `d`.
pub fn matched_filter(received: &Signal, replica: &Signal) -> Result<Signal> {
    check_rates(received, replica)?;
    let n_recv = received.len();
    let n_rep = replica.len();
    let n_full = n_recv + n_rep - 1;
    let mut a = vec![Complex64::new(0.0, 0.0); n_full];
    let mut b = vec![Complex64::new(0.0, 0.0); n_full];
    a[..n_recv].copy_from_slice(received.samples());
    for (i, s) in replica.samples().iter().enumerate() {
        // conjugate time-reversed replica
        b[n_rep - 1 - i] = s.conj();
    }
    fft_forward(&mut a);
    fft_forward(&mut b);
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x *= y;
    }
    fft_inverse(&mut a);
    // lag 0 sits at index n_rep - 1 of the full correlation
    let out = a[n_rep - 1..n_rep - 1 + n_recv].to_vec();
    Signal::new(out, received.sample_rate())
}

/// Frequency response shape for [`butterworth_filter`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    Lowpass,
    Highpass,
}

/// Zero-phase Butterworth band limit, low-pass form.
///
/// The magnitude response `1/sqrt(1 + (f/fc)^(2*order))` is applied in the
/// frequency domain; `cutoff` is the corner as a fraction of Nyquist.
pub fn butterworth_bandlimit(x: &Signal, order: usize, cutoff: f64) -> Result<Signal> {
    butterworth_filter(x, order, cutoff, FilterKind::Lowpass)
}

/// Zero-phase Butterworth magnitude filter of configurable type.
pub fn butterworth_filter(x: &Signal, order: usize, cutoff: f64, kind: FilterKind) -> Result<Signal> {
    if order == 0 {
        return Err(Error::InvalidParameter("butterworth order must be >= 1".into()));
    }
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "butterworth cutoff must lie in (0, 1) of Nyquist, got {cutoff}"
        )));
    }
    let n = x.len();
    let nyquist = x.sample_rate() / 2.0;
    let fc = cutoff * nyquist;
    let mut spec = x.samples().to_vec();
    fft_forward(&mut spec);
    for (k, v) in spec.iter_mut().enumerate() {
        // two-sided spectrum: bin k carries |f| = min(k, N-k) * f_s / N
        let f = k.min(n - k) as f64 * x.sample_rate() / n as f64;
        let gain = match kind {
            FilterKind::Lowpass => 1.0 / (1.0 + (f / fc).powi(2 * order as i32)).sqrt(),
            FilterKind::Highpass => {
                if f == 0.0 {
                    0.0
                } else {
                    1.0 / (1.0 + (fc / f).powi(2 * order as i32)).sqrt()
                }
            }
        };
        *v *= gain;
    }
    fft_inverse(&mut spec);
    Signal::new(spec, x.sample_rate())
}

/// Add white Gaussian noise at the requested SNR (dB), measured against the
/// signal's average power. Deterministic for a fixed seed.
///
/// Real signals (all imaginary parts exactly zero) receive real noise;
/// complex signals receive circular complex noise.
pub fn add_awgn(x: &Signal, snr_db: f64, seed: u64) -> Result<Signal> {
    let power = x.mean_power();
    if power == 0.0 {
        return Err(Error::InvalidParameter("SNR is undefined for an all-zero signal".into()));
    }
    let noise_power = power / 10f64.powf(snr_db / 10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let samples: Vec<Complex64> = if x.is_real() {
        let sigma = noise_power.sqrt();
        x.samples()
            .iter()
            .map(|s| {
                let n: f64 = normal.sample(&mut rng);
                Complex64::new(s.re + sigma * n, 0.0)
            })
            .collect()
    } else {
        let sigma = (noise_power / 2.0).sqrt();
        x.samples()
            .iter()
            .map(|s| {
                let nr: f64 = normal.sample(&mut rng);
                let ni: f64 = normal.sample(&mut rng);
                s + Complex64::new(sigma * nr, sigma * ni)
            })
            .collect()
    };
    Signal::new(samples, x.sample_rate())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn delta(n: usize, at: usize, fs: f64) -> Signal {
        let mut s = vec![c(0.0, 0.0); n];
        s[at] = c(1.0, 0.0);
        Signal::new(s, fs).unwrap()
    }

    #[test]
    fn convolution_identities() {
        let fs = 100.0;
        let x = Signal::from_real(&[1.0, -2.0, 3.0, 0.5], fs).unwrap();
        // delta_0 * x = x (padded by the full-convolution tail)
        let d0 = delta(1, 0, fs);
        let out = convolve_response(&x, &d0).unwrap();
        assert_eq!(out.len(), 4);
        for (a, b) in out.samples().iter().zip(x.samples()) {
            assert!((a - b).norm() < 1e-12);
        }
        // x * delta_k delays by k
        let dk = delta(5, 3, fs);
        let delayed = convolve_response(&x, &dk).unwrap();
        assert_eq!(delayed.len(), 4 + 5 - 1);
        for i in 0..4 {
            assert!((delayed.samples()[i + 3] - x.samples()[i]).norm() < 1e-12);
        }
        for i in 0..3 {
            assert!(delayed.samples()[i].norm() < 1e-12);
        }
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let fs = 10.0;
        let a: Vec<Complex64> = (0..17).map(|i| c((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
        let b: Vec<Complex64> = (0..9).map(|i| c((i as f64 * 0.91).cos(), -(i as f64 * 0.53).sin())).collect();
        let sa = Signal::new(a.clone(), fs).unwrap();
        let sb = Signal::new(b.clone(), fs).unwrap();
        let fast = convolve_response(&sa, &sb).unwrap();
        let mut direct = vec![c(0.0, 0.0); a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                direct[i + j] += ai * bj;
            }
        }
        for (f, d) in fast.samples().iter().zip(direct.iter()) {
            assert!((f - d).norm() < 1e-10);
        }
    }

    #[test]
    fn convolution_rejects_rate_mismatch() {
        let a = Signal::from_real(&[1.0], 10.0).unwrap();
        let b = Signal::from_real(&[1.0], 20.0).unwrap();
        assert!(convolve_response(&a, &b).is_err());
        assert!(matched_filter(&a, &b).is_err());
    }

    #[test]
    fn matched_filter_peaks_at_embedded_delay() {
        let fs = 1000.0;
        let replica = Signal::from_real(&[1.0, -1.0, 1.0, 1.0, -1.0], fs).unwrap();
        let mut received = vec![c(0.0, 0.0); 256];
        for (i, s) in replica.samples().iter().enumerate() {
            received[100 + i] = *s;
        }
        let received = Signal::new(received, fs).unwrap();
        let out = matched_filter(&received, &replica).unwrap();
        assert_eq!(out.len(), 256);
        let peak = out
            .samples()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap()
            .0;
        assert_eq!(peak, 100);
    }

    #[test]
    fn matched_filter_of_zero_is_zero() {
        let fs = 1000.0;
        let replica = Signal::from_real(&[1.0, 2.0, 3.0], fs).unwrap();
        let received = Signal::zeros(64, fs).unwrap();
        let out = matched_filter(&received, &replica).unwrap();
        assert!(out.norm() < 1e-14);
    }

    #[test]
    fn matched_filter_noise_only_has_no_dominant_peak() {
        // Monte Carlo: with no target present the peak-to-mean ratio of the
        // matched filter magnitude stays modest over 100 trials.
        let fs = 10_000.0;
        let replica = crate::synth::lfm_chirp(1000.0, 3000.0, 4e-3, fs).unwrap();
        let mut worst: f64 = 0.0;
        for trial in 0..100 {
            let noise = add_awgn(&Signal::from_real(&vec![1e-12; 512], fs).unwrap(), -240.0, trial).unwrap();
            let out = matched_filter(&noise, &replica).unwrap();
            let mags: Vec<f64> = out.samples().iter().map(|v| v.norm()).collect();
            let peak = mags.iter().cloned().fold(0.0, f64::max);
            let mean = mags.iter().sum::<f64>() / mags.len() as f64;
            worst = worst.max(peak / mean);
        }
        assert!(worst < 8.0, "noise-only peak-to-mean ratio {worst} looks like a target");
        // and an embedded replica does produce a dominant peak
        let mut with_target = vec![c(0.0, 0.0); 512];
        for (i, s) in replica.samples().iter().take(200).enumerate() {
            with_target[120 + i] = *s;
        }
        let out = matched_filter(&Signal::new(with_target, fs).unwrap(), &replica).unwrap();
        let mags: Vec<f64> = out.samples().iter().map(|v| v.norm()).collect();
        let peak = mags.iter().cloned().fold(0.0, f64::max);
        let mean = mags.iter().sum::<f64>() / mags.len() as f64;
        assert!(peak / mean > 10.0);
    }

    #[test]
    fn butterworth_leaves_dc_alone_and_cuts_high_tones() {
        let fs = 1000.0;
        let dc = Signal::from_real(&vec![1.0; 256], fs).unwrap();
        let filtered = butterworth_bandlimit(&dc, 3, 0.9).unwrap();
        for (a, b) in filtered.samples().iter().zip(dc.samples()) {
            assert!((a - b).norm() < 1e-6);
        }

        // tone far above cutoff: attenuation approaches the analytic magnitude
        let order = 3;
        let cutoff = 0.2;
        let tone_freq = 300.0; // 0.6 of Nyquist, three times the corner
        let n = 1000;
        let tone: Vec<f64> = (0..n).map(|i| (2.0 * std::f64::consts::PI * tone_freq * i as f64 / fs).sin()).collect();
        let tone = Signal::from_real(&tone, fs).unwrap();
        let out = butterworth_filter(&tone, order, cutoff, FilterKind::Lowpass).unwrap();
        let expected_gain = 1.0 / (1.0 + (tone_freq / (cutoff * fs / 2.0)).powi(2 * order as i32)).sqrt();
        let measured = out.norm() / tone.norm();
        assert!(
            (measured - expected_gain).abs() < 0.02 * expected_gain,
            "measured {measured}, expected {expected_gain}"
        );
    }

    #[test]
    fn butterworth_half_power_at_corner() {
        // ratio of filtered to unfiltered spectra recovers |H|; the -3 dB
        // point must sit at the corner within 2%
        let fs = 2000.0;
        let n = 4096;
        let noise = add_awgn(&Signal::from_real(&vec![1e-15; n], fs).unwrap(), -300.0, 42).unwrap();
        let filtered = butterworth_bandlimit(&noise, 3, 0.25).unwrap();
        let mut before = noise.samples().to_vec();
        let mut after = filtered.samples().to_vec();
        fft_forward(&mut before);
        fft_forward(&mut after);
        let half = n / 2;
        let gains: Vec<f64> = (0..half).map(|k| after[k].norm() / before[k].norm()).collect();
        let target = (0.5f64).sqrt();
        let crossing = gains.iter().position(|&g| g < target).unwrap();
        // linear interpolation between the two straddling bins
        let g_hi = gains[crossing - 1];
        let g_lo = gains[crossing];
        let frac = (g_hi - target) / (g_hi - g_lo);
        let f_cross = (crossing as f64 - 1.0 + frac) * fs / n as f64;
        let f_corner = 0.25 * fs / 2.0;
        assert!(
            (f_cross - f_corner).abs() < 0.02 * f_corner,
            "corner at {f_cross} Hz, expected {f_corner} Hz"
        );
    }

    #[test]
    fn butterworth_rejects_bad_cutoff() {
        let x = Signal::from_real(&[1.0, 2.0], 10.0).unwrap();
        assert!(butterworth_bandlimit(&x, 3, 0.0).is_err());
        assert!(butterworth_bandlimit(&x, 3, 1.0).is_err());
        assert!(butterworth_bandlimit(&x, 0, 0.5).is_err());
    }

    #[test]
    fn awgn_matches_requested_snr() {
        let fs = 1000.0;
        let n = 1_000_000;
        let tone: Vec<f64> = (0..n).map(|i| (0.01 * i as f64).sin()).collect();
        let x = Signal::from_real(&tone, fs).unwrap();
        let noisy = add_awgn(&x, 10.0, 123).unwrap();
        let noise_power = noisy.try_sub(&x).unwrap().mean_power();
        let snr = 10.0 * (x.mean_power() / noise_power).log10();
        assert!((snr - 10.0).abs() < 0.05, "empirical SNR {snr} dB");
    }

    #[test]
    fn awgn_snr_error_shrinks_with_length() {
        let fs = 1000.0;
        let measure = |n: usize| {
            let tone: Vec<f64> = (0..n).map(|i| (0.02 * i as f64).cos()).collect();
            let x = Signal::from_real(&tone, fs).unwrap();
            let noisy = add_awgn(&x, 6.0, 9).unwrap();
            let noise_power = noisy.try_sub(&x).unwrap().mean_power();
            (10.0 * (x.mean_power() / noise_power).log10() - 6.0).abs()
        };
        // O(N^{-1/2}) convergence: two decades of length should shrink the
        // deviation by roughly 10x; allow generous slack
        let short = measure(1000);
        let long = measure(100_000);
        assert!(long < short, "short-record error {short}, long-record error {long}");
    }

    #[test]
    fn awgn_is_deterministic_and_nearly_transparent_at_huge_snr() {
        let x = Signal::from_real(&[1.0, -1.0, 0.5, 2.0], 10.0).unwrap();
        let a = add_awgn(&x, 20.0, 7).unwrap();
        let b = add_awgn(&x, 20.0, 7).unwrap();
        assert_eq!(a.samples(), b.samples());
        let clean = add_awgn(&x, 300.0, 7).unwrap();
        for (u, v) in clean.samples().iter().zip(x.samples()) {
            assert!((u - v).norm() < 1e-12);
        }
        assert!(add_awgn(&Signal::zeros(4, 10.0).unwrap(), 10.0, 0).is_err());
    }

    #[test]
    fn awgn_keeps_real_signals_real_and_complex_complex() {
        let real = Signal::from_real(&[1.0, 2.0, 3.0], 10.0).unwrap();
        assert!(add_awgn(&real, 0.0, 1).unwrap().is_real());
        let complex = Signal::new(vec![c(1.0, 1.0), c(0.5, -0.25)], 10.0).unwrap();
        assert!(!add_awgn(&complex, 0.0, 1).unwrap().is_real());
    }
}
