use std::time::Instant;

use morphsep_core::esp::{EnvelopeSet, EspFrame};
use morphsep_core::frame::{DftFrame, IdentityFrame};
use morphsep_core::signal::relative_error;
use morphsep_core::solver::{lambda_max, solve_mca, SolverConfig};
use morphsep_core::synth::{driven_oscillator, spike_plus_sine, OscillatorSpec};

fn main() {
    // --- criterion 2: oscillator via ESP MCA BP ---
    let spec = OscillatorSpec {
        tau: 2e-3,
        f0: 20_000.0,
        f: 15_000.0,
        forcing_amplitude: 1e10,
        sample_rate: 100_000.0,
        n: 1000,
    };
    let osc = driven_oscillator(&spec).unwrap();
    let n = spec.n;
    let fs = spec.sample_rate;

    let env1 = EnvelopeSet::exponential(&[spec.tau], fs, n)
        .unwrap()
        .normalize_parseval()
        .unwrap();
    let env2 = EnvelopeSet::rectangular(&[n as f64 / fs], fs, n)
        .unwrap()
        .normalize_parseval()
        .unwrap();
    let a1 = EspFrame::new(env1).unwrap();
    let a2 = EspFrame::new(env2).unwrap();

    let lm = lambda_max(&osc.total, &a1, &a2).unwrap();
    println!("oscillator lambda_max = {lm}, |y| = {}", osc.total.norm());

    for lambda_frac in [0.5, 0.1, 0.01] {
        let t0 = Instant::now();
        let cfg = SolverConfig::bp(lambda_frac * lm, 1000);
        let res = solve_mca(&osc.total, &a1, &a2, &cfg).unwrap();
        let e_h = relative_error(res.y1.samples(), osc.homogeneous.samples());
        let e_p = relative_error(res.y2.samples(), osc.particular.samples());
        println!(
            "osc ESP BP frac={lambda_frac}: hom err {:.4}%, part err {:.4}%, resid {:.2e}, {:?}",
            e_h * 100.0,
            e_p * 100.0,
            res.relative_residual(&osc.total),
            t0.elapsed()
        );
    }

    // --- criterion 1: spike+sine via FFT MCA BPD ---
    let ss = spike_plus_sine(1000, 10_000.0, 50, 1000.0).unwrap();
    let i1 = IdentityFrame::new(1000).unwrap();
    let f1 = DftFrame::new(1000).unwrap();
    let lm2 = lambda_max(&ss.mixture, &i1, &f1).unwrap();
    println!("spike+sine lambda_max = {lm2}");
    for lambda_frac in [1e-2, 1e-3, 1e-4] {
        for mu in [1.0, 0.1] {
            let t0 = Instant::now();
            let cfg = SolverConfig::bpd(lambda_frac * lm2, 1000).with_mu(mu);
            let res = solve_mca(&ss.mixture, &i1, &f1, &cfg).unwrap();
            let e1 = relative_error(res.y1.samples(), ss.spike.samples());
            let e2 = relative_error(res.y2.samples(), ss.sine.samples());
            println!(
                "spike+sine BPD frac={lambda_frac} mu={mu}: spike err {:.4}%, sine err {:.4}%, {:?}",
                e1 * 100.0,
                e2 * 100.0,
                t0.elapsed()
            );
        }
    }

    // --- criterion 3: degenerate ESP vs FFT MCA on the spike+sine signal, BP ---
    let mut one_hot = vec![num_complex::Complex64::new(0.0, 0.0); 1000];
    one_hot[0] = num_complex::Complex64::new(1.0, 0.0);
    let d1 = EspFrame::new(
        EnvelopeSet::raw(vec![one_hot], 10_000.0).unwrap().normalize_parseval().unwrap(),
    )
    .unwrap();
    let d2 = EspFrame::new(
        EnvelopeSet::raw(vec![vec![num_complex::Complex64::new(1.0, 0.0); 1000]], 10_000.0)
            .unwrap()
            .normalize_parseval()
            .unwrap(),
    )
    .unwrap();
    for lambda_frac in [0.1, 0.01] {
        let lm_esp = lambda_max(&ss.mixture, &d1, &d2).unwrap();
        let t0 = Instant::now();
        let esp_res = solve_mca(&ss.mixture, &d1, &d2, &SolverConfig::bp(lambda_frac * lm_esp, 1000)).unwrap();
        let fft_res = solve_mca(&ss.mixture, &i1, &f1, &SolverConfig::bp(lambda_frac * lm2, 1000)).unwrap();
        let d_y1 = relative_error(esp_res.y1.samples(), fft_res.y1.samples());
        let d_y2 = relative_error(esp_res.y2.samples(), fft_res.y2.samples());
        println!(
            "degenerate frac={lambda_frac}: y1 diff {:.4}%, y2 diff {:.4}%, esp solve {:?}",
            d_y1 * 100.0,
            d_y2 * 100.0,
            t0.elapsed()
        );
    }
}
