use std::time::Instant;
use num_complex::Complex64;
use rustfft::FftPlanner;
use morphsep_core::esp::{EnvelopeSet, EspFrame};
use morphsep_core::frame::Frame;

fn main() {
    let n = 1000;
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let mut buf: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 0.5)).collect();
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let t0 = Instant::now();
    let reps = 40_000;
    for _ in 0..reps {
        fft.process_with_scratch(&mut buf, &mut scratch);
    }
    let per = t0.elapsed().as_secs_f64() / reps as f64;
    println!("bare FFT(1000): {:.2} us", per * 1e6);

    let env = EnvelopeSet::exponential(&[2e-3], 100_000.0, n).unwrap().normalize_parseval().unwrap();
    let frame = EspFrame::new(env).unwrap();
    let w: Vec<Complex64> = (0..n).map(|i| Complex64::new((i as f64 * 0.01).sin(), 0.0)).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); frame.coeff_dim()];
    let t1 = Instant::now();
    for _ in 0..10 {
        frame.analyze_into(&w, &mut out).unwrap();
    }
    println!("esp analyze (L=1, N=1000): {:.1} ms", t1.elapsed().as_secs_f64() / 10.0 * 1e3);
    let mut sig = vec![Complex64::new(0.0, 0.0); n];
    let t2 = Instant::now();
    for _ in 0..10 {
        frame.synthesize_into(&out, &mut sig).unwrap();
    }
    println!("esp synthesize (L=1, N=1000): {:.1} ms", t2.elapsed().as_secs_f64() / 10.0 * 1e3);
}
