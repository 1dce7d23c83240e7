//! Operator-level invariants for the identity/DFT frame pair and the
//! soft-thresholding operator.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use morphsep_core::frame::{soft_threshold, DftFrame, Frame, IdentityFrame};

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect()
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn frames(n: usize) -> Vec<Box<dyn Frame>> {
    vec![
        Box::new(IdentityFrame::new(n).unwrap()),
        Box::new(DftFrame::new(n).unwrap()),
    ]
}

#[test]
fn tight_frame_identity_holds_on_random_vectors() {
    for n in [16usize, 33] {
        for frame in frames(n) {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            for _ in 0..100 {
                let w = random_vector(n, &mut rng);
                let back = frame.synthesize(&frame.analyze(&w).unwrap()).unwrap();
                let p = frame.frame_constant();
                let err: f64 = back
                    .iter()
                    .zip(w.iter())
                    .map(|(b, x)| (b - p * x).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(
                    err < 1e-10 * norm(&w),
                    "{}: A A* w != p w (err {err})",
                    frame.id()
                );
            }
        }
    }
}

#[test]
fn frame_norm_identity_holds() {
    for n in [16usize, 33] {
        for frame in frames(n) {
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            for _ in 0..100 {
                let w = random_vector(n, &mut rng);
                let coeffs = frame.analyze(&w).unwrap();
                let lhs = norm(&coeffs).powi(2);
                let rhs = frame.frame_constant() * norm(&w).powi(2);
                assert!(
                    (lhs - rhs).abs() < 1e-10 * rhs,
                    "{}: ||A* w||^2 = {lhs}, p ||w||^2 = {rhs}",
                    frame.id()
                );
            }
        }
    }
}

#[test]
fn analysis_and_synthesis_are_adjoint() {
    for n in [16usize, 33] {
        for frame in frames(n) {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            for _ in 0..50 {
                let w = random_vector(n, &mut rng);
                let c = random_vector(frame.coeff_dim(), &mut rng);
                let lhs = inner(&frame.analyze(&w).unwrap(), &c);
                let rhs = inner(&w, &frame.synthesize(&c).unwrap());
                assert!(
                    (lhs - rhs).norm() < 1e-10 * norm(&w) * norm(&c),
                    "{}: <A* w, c> = {lhs}, <w, A c> = {rhs}",
                    frame.id()
                );
            }
        }
    }
}

proptest! {
    #[test]
    fn soft_threshold_is_a_contraction(
        ar in -10.0f64..10.0,
        ai in -10.0f64..10.0,
        br in -10.0f64..10.0,
        bi in -10.0f64..10.0,
        t in 0.0f64..5.0,
    ) {
        let a = Complex64::new(ar, ai);
        let b = Complex64::new(br, bi);
        let sa = soft_threshold(a, t).unwrap();
        let sb = soft_threshold(b, t).unwrap();
        prop_assert!((sa - sb).norm() <= (a - b).norm() + 1e-12);
    }

    #[test]
    fn soft_threshold_preserves_phase_and_shrinks(
        re in -10.0f64..10.0,
        im in -10.0f64..10.0,
        t in 0.0f64..5.0,
    ) {
        let x = Complex64::new(re, im);
        let s = soft_threshold(x, t).unwrap();
        prop_assert!(s.norm() <= x.norm() + 1e-12);
        if s.norm() > 0.0 {
            // the output points along the input
            let cross = (x * s.conj()).im.abs();
            prop_assert!(cross < 1e-9 * x.norm() * s.norm());
            prop_assert!((s.norm() - (x.norm() - t)).abs() < 1e-9);
        } else {
            prop_assert!(x.norm() <= t + 1e-12);
        }
    }
}
