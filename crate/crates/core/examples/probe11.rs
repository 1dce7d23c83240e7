use morphsep_core::frame::{DftFrame, IdentityFrame};
use morphsep_core::metrics::{interval_errors, TimeInterval};
use morphsep_core::process::{add_awgn, convolve_response, matched_filter};
use morphsep_core::signal::Signal;
use morphsep_core::solver::{lambda_max, solve_mca, SolverConfig};
use morphsep_core::synth::*;

fn chain_of(t: &SyntheticTargetSpec, snr: Option<(f64, u64)>) -> (Signal, Signal) {
    let target = synthetic_elastic_target(t).unwrap();
    let chirp = lfm_chirp(4000.0, 10000.0, 1e-3, t.sample_rate).unwrap();
    let conv = convolve_response(&target.total, &chirp).unwrap();
    let clean = matched_filter(&conv, &chirp).unwrap();
    let noisy = match snr {
        Some((db, seed)) => matched_filter(&add_awgn(&conv, db, seed).unwrap(), &chirp).unwrap(),
        None => clean.clone(),
    };
    (clean, noisy)
}

fn main() {
    let mut v4 = SyntheticTargetSpec::desk_default();
    v4.n = 250;
    v4.resonances = vec![
        ResonanceSpec { frequency: 3000.0, decay: 15e-3, amplitude: 0.12, start: 1.96e-3 },
        ResonanceSpec { frequency: 4500.0, decay: 20e-3, amplitude: 0.10, start: 2.04e-3 },
        ResonanceSpec { frequency: 6500.0, decay: 30e-3, amplitude: 0.10, start: 2.12e-3 },
        ResonanceSpec { frequency: 8000.0, decay: 40e-3, amplitude: 0.08, start: 2.20e-3 },
    ];
    let i1 = TimeInterval::new(1e-3, 2e-3).unwrap();
    let i2 = TimeInterval::new(2.5e-3, 6e-3).unwrap();

    let (clean, _) = chain_of(&v4, None);
    let n = clean.len();
    let a1 = IdentityFrame::new(n).unwrap();
    let a2 = DftFrame::new(n).unwrap();
    let lm = lambda_max(&clean, &a1, &a2).unwrap();
    for frac in [1e-3, 1e-2, 0.05] {
        let res = solve_mca(&clean, &a1, &a2, &SolverConfig::bpd(frac * lm, 1000)).unwrap();
        let m = interval_errors(&clean, &res.y1, &res.y2, i1, i2, None).unwrap();
        println!("clean floor at frac={frac}: m1={:.4} m2={:.4}", m.m1, m.m2);
    }

    // full grid, 10 realizations, SNR {10,20,30,40}
    let grid: Vec<f64> = (0..12).map(|j| 10f64.powf(-3.0 + 0.25 * j as f64)).collect();
    for snr in [10.0, 20.0, 30.0, 40.0] {
        let mut best = (f64::INFINITY, 0.0, f64::INFINITY, 0.0);
        for &frac in &grid {
            let mut m1s = vec![];
            let mut m2s = vec![];
            for r in 0..10u64 {
                let (clean, noisy) = chain_of(&v4, Some((snr, 5000 + r * 13 + (snr as u64) * 101)));
                let lmn = lambda_max(&noisy, &a1, &a2).unwrap();
                let res = solve_mca(&noisy, &a1, &a2, &SolverConfig::bpd(frac * lmn, 1000)).unwrap();
                let m = interval_errors(&noisy, &res.y1, &res.y2, i1, i2, Some(&clean)).unwrap();
                m1s.push(m.m1);
                m2s.push(m.m2);
            }
            let mean1 = m1s.iter().sum::<f64>() / m1s.len() as f64;
            let mean2 = m2s.iter().sum::<f64>() / m2s.len() as f64;
            if mean1 < best.0 { best.0 = mean1; best.1 = frac; }
            if mean2 < best.2 { best.2 = mean2; best.3 = frac; }
        }
        println!("snr {snr}: best m1={:.4} (frac {:.4}), best m2={:.4} (frac {:.4})", best.0, best.1, best.2, best.3);
    }
}
