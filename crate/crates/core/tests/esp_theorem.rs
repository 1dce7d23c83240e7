//! Numerical verification of the enveloped-sinusoid frame theory: tight-frame
//! constant for arbitrary envelope sets, and agreement between the
//! FFT-diagonalized transforms and the dense definitional path.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use morphsep_core::esp::{EnvelopeSet, EspFrame};
use morphsep_core::frame::Frame;

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect()
}

fn random_envelopes(l: usize, n: usize, rng: &mut ChaCha8Rng) -> EnvelopeSet {
    let envelopes = (0..l).map(|_| random_vector(n, rng)).collect();
    EnvelopeSet::raw(envelopes, 1.0).unwrap()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn tight_frame_constant_for_arbitrary_envelopes() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for n in [8usize, 16, 32] {
        for l in [1usize, 2, 3] {
            let set = random_envelopes(l, n, &mut rng);
            let expected_p: f64 = n as f64
                * set
                    .envelopes()
                    .iter()
                    .map(|e| e.iter().map(|v| v.norm_sqr()).sum::<f64>())
                    .sum::<f64>();
            let frame = EspFrame::new(set).unwrap();
            assert!(
                (frame.frame_constant() - expected_p).abs() < 1e-12 * expected_p,
                "frame constant mismatch at N={n}, L={l}"
            );
            for _ in 0..10 {
                let w = random_vector(n, &mut rng);
                let back = frame.synthesize(&frame.analyze(&w).unwrap()).unwrap();
                let err: f64 = back
                    .iter()
                    .zip(w.iter())
                    .map(|(b, x)| (b - expected_p * x).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(
                    err < 1e-9 * expected_p * norm(&w),
                    "A A* w != p w at N={n}, L={l}: relative error {}",
                    err / (expected_p * norm(&w))
                );
            }
        }
    }
}

#[test]
fn fast_transforms_match_the_dense_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    for n in [8usize, 16, 32] {
        for l in [1usize, 2, 3] {
            let frame = EspFrame::new(random_envelopes(l, n, &mut rng)).unwrap();
            let w = random_vector(n, &mut rng);
            let fast = frame.analyze(&w).unwrap();
            let dense = frame.analyze_dense(&w).unwrap();
            let diff = max_abs_diff(&fast, &dense);
            assert!(diff < 1e-10, "analysis fast vs dense at N={n}, L={l}: {diff}");

            let coeffs = random_vector(frame.coeff_dim(), &mut rng);
            let fast_s = frame.synthesize(&coeffs).unwrap();
            let dense_s = frame.synthesize_dense(&coeffs).unwrap();
            let diff_s = max_abs_diff(&fast_s, &dense_s);
            assert!(diff_s < 1e-10, "synthesis fast vs dense at N={n}, L={l}: {diff_s}");
        }
    }
}

#[test]
fn fast_analysis_matches_dense_for_rectangular_envelopes() {
    // the per-operation example: two rectangular envelopes, random input
    let mut rng = ChaCha8Rng::seed_from_u64(300);
    let n = 16;
    let set = EnvelopeSet::rectangular(&[3.0 / 16.0, 7.0 / 16.0], 16.0, n).unwrap();
    let frame = EspFrame::new(set).unwrap();
    let w = random_vector(n, &mut rng);
    let diff = max_abs_diff(&frame.analyze(&w).unwrap(), &frame.analyze_dense(&w).unwrap());
    assert!(diff < 1e-10, "max abs diff {diff}");
}

#[test]
fn esp_analysis_and_synthesis_are_adjoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(400);
    let n = 16;
    for l in [1usize, 2] {
        let frame = EspFrame::new(random_envelopes(l, n, &mut rng)).unwrap();
        for _ in 0..10 {
            let w = random_vector(n, &mut rng);
            let c = random_vector(frame.coeff_dim(), &mut rng);
            let lhs: Complex64 = frame
                .analyze(&w)
                .unwrap()
                .iter()
                .zip(c.iter())
                .map(|(x, y)| x * y.conj())
                .sum();
            let rhs: Complex64 = w
                .iter()
                .zip(frame.synthesize(&c).unwrap().iter())
                .map(|(x, y)| x * y.conj())
                .sum();
            assert!(
                (lhs - rhs).norm() < 1e-9 * norm(&w) * norm(&c),
                "adjoint mismatch at L={l}: {lhs} vs {rhs}"
            );
        }
    }
}

#[test]
fn parseval_normalized_frame_reconstructs_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let n = 24;
    let set = random_envelopes(2, n, &mut rng).normalize_parseval().unwrap();
    let frame = EspFrame::new(set).unwrap();
    assert!((frame.frame_constant() - 1.0).abs() < 1e-12);
    let w = random_vector(n, &mut rng);
    let back = frame.synthesize(&frame.analyze(&w).unwrap()).unwrap();
    assert!(max_abs_diff(&back, &w) < 1e-10);
}

#[test]
fn degenerate_envelopes_mirror_the_fft_frames() {
    // one-hot envelope: every atom is a shifted impulse, so analysis rows are
    // copies of the signal; constant envelope: atoms are phase-rotated
    // sinusoids, so a pure tone concentrates on its own frequency index
    let n = 16;
    let mut one_hot = vec![Complex64::new(0.0, 0.0); n];
    one_hot[0] = Complex64::new(1.0, 0.0);
    let spike_frame = EspFrame::new(EnvelopeSet::raw(vec![one_hot], 1.0).unwrap()).unwrap();
    let tone: Vec<Complex64> = (0..n)
        .map(|i| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 4.0 * i as f64 / n as f64))
        .collect();
    let spike_coeffs = spike_frame.analyze_signal(&morphsep_core::Signal::new(tone.clone(), 1.0).unwrap()).unwrap();
    for k in 0..n {
        for m in 0..n {
            assert!(
                (spike_coeffs.get(0, k, m) - tone[m]).norm() < 1e-9,
                "one-hot frame analysis should sample the signal"
            );
        }
    }

    let const_frame =
        EspFrame::new(EnvelopeSet::raw(vec![vec![Complex64::new(1.0, 0.0); n]], 1.0).unwrap()).unwrap();
    let const_coeffs = const_frame.analyze_signal(&morphsep_core::Signal::new(tone, 1.0).unwrap()).unwrap();
    let mut energy_at_k = vec![0.0f64; n];
    for k in 0..n {
        for m in 0..n {
            energy_at_k[k] += const_coeffs.get(0, k, m).norm_sqr();
        }
    }
    let total: f64 = energy_at_k.iter().sum();
    assert!(
        energy_at_k[4] > 0.999 * total,
        "pure tone should concentrate on its frequency index, got {energy_at_k:?}"
    );
}
