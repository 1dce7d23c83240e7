//! End-to-end behavior of the pulse processing chain
//! (convolve -> band-limit -> noise -> matched filter).

use morphsep_core::process::{add_awgn, butterworth_bandlimit, convolve_response, matched_filter};
use morphsep_core::signal::{relative_error, Signal};
use morphsep_core::synth::{lfm_chirp, synthetic_elastic_target, SyntheticTargetSpec};

#[test]
fn chirp_autocorrelation_has_sharp_mainlobe() {
    // 15-45 kHz over 1 ms at 300 kHz: peak-to-sidelobe ratio above 10 dB
    let chirp = lfm_chirp(15_000.0, 45_000.0, 1e-3, 300_000.0).unwrap();
    let mut padded = vec![num_complex::Complex64::new(0.0, 0.0); 1200];
    for (i, s) in chirp.samples().iter().enumerate() {
        padded[450 + i] = *s;
    }
    let received = Signal::new(padded, 300_000.0).unwrap();
    let out = matched_filter(&received, &chirp).unwrap();
    let mags: Vec<f64> = out.samples().iter().map(|v| v.norm()).collect();
    let (peak_idx, peak) = mags
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i, *v))
        .unwrap();
    assert_eq!(peak_idx, 450, "autocorrelation must peak at the embedding delay");
    let guard = 30; // mainlobe width allowance
    let sidelobe = mags
        .iter()
        .enumerate()
        .filter(|(i, _)| (*i as i64 - peak_idx as i64).unsigned_abs() > guard)
        .map(|(_, v)| *v)
        .fold(0.0f64, f64::max);
    let psr_db = 20.0 * (peak / sidelobe).log10();
    assert!(psr_db > 10.0, "peak-to-sidelobe ratio {psr_db} dB");
}

#[test]
fn chain_is_linear_over_target_components() {
    // processing the mixture equals processing the components and summing
    let spec = SyntheticTargetSpec::desk_default();
    let target = synthetic_elastic_target(&spec).unwrap();
    let chirp = lfm_chirp(4_000.0, 10_000.0, 1e-3, spec.sample_rate).unwrap();

    let chain = |s: &Signal| -> Signal {
        let convolved = convolve_response(s, &chirp).unwrap();
        let limited = butterworth_bandlimit(&convolved, 3, 0.9).unwrap();
        matched_filter(&limited, &chirp).unwrap()
    };

    let whole = chain(&target.total);
    let parts = chain(&target.short_truth).try_add(&chain(&target.long_truth)).unwrap();
    let rel = relative_error(parts.samples(), whole.samples());
    assert!(rel < 1e-12, "chain must distribute over the additive mixture: {rel}");
}

#[test]
fn matched_filter_sharpens_the_chirp_response() {
    // an embedded chirp return compresses to its arrival index after the chain
    let spec = SyntheticTargetSpec::desk_default();
    let target = synthetic_elastic_target(&spec).unwrap();
    let chirp = lfm_chirp(4_000.0, 10_000.0, 1e-3, spec.sample_rate).unwrap();
    let convolved = convolve_response(&target.short_truth, &chirp).unwrap();
    let noisy = add_awgn(&convolved, 30.0, 9).unwrap();
    let filtered = matched_filter(&noisy, &chirp).unwrap();

    let mags: Vec<f64> = filtered.samples().iter().map(|v| v.norm()).collect();
    let peak_idx = mags
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    let pulse_arrival = (spec.pulse.as_ref().unwrap().arrival * spec.sample_rate).round() as usize;
    assert!(
        (peak_idx as i64 - pulse_arrival as i64).unsigned_abs() <= 12,
        "compressed peak at {peak_idx}, pulse arrival index {pulse_arrival}"
    );
}
