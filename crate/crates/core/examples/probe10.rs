use morphsep_core::frame::{DftFrame, IdentityFrame};
use morphsep_core::metrics::{interval_errors, TimeInterval};
use morphsep_core::process::{add_awgn, convolve_response, matched_filter};
use morphsep_core::signal::Signal;
use morphsep_core::solver::{lambda_max, solve_mca, SolverConfig};
use morphsep_core::synth::*;

struct Chain { target: SyntheticTargetSpec, i1: TimeInterval, i2: TimeInterval }

fn chain(c: &Chain, snr: Option<(f64, u64)>) -> (Signal, Signal) {
    let t = synthetic_elastic_target(&c.target).unwrap();
    let chirp = lfm_chirp(4000.0, 10000.0, 1e-3, c.target.sample_rate).unwrap();
    let conv = convolve_response(&t.total, &chirp).unwrap();
    let clean = matched_filter(&conv, &chirp).unwrap();
    let noisy = match snr {
        Some((db, seed)) => matched_filter(&add_awgn(&conv, db, seed).unwrap(), &chirp).unwrap(),
        None => clean.clone(),
    };
    (clean, noisy)
}

fn floor_and_trend(name: &str, c: &Chain) {
    let (clean, _) = chain(c, None);
    let n = clean.len();
    let a1 = IdentityFrame::new(n).unwrap();
    let a2 = DftFrame::new(n).unwrap();
    // clean floor at a small lambda
    let lm = lambda_max(&clean, &a1, &a2).unwrap();
    let res = solve_mca(&clean, &a1, &a2, &SolverConfig::bpd(1e-3 * lm, 1000)).unwrap();
    let m = interval_errors(&clean, &res.y1, &res.y2, c.i1, c.i2, None).unwrap();
    print!("{name}: clean floor m1={:.3} m2={:.3} | best-lambda means:", m.m1, m.m2);
    // mini sweep: 3 SNRs x 8 realizations x small grid
    for snr in [10.0, 25.0, 40.0] {
        let mut best = (f64::INFINITY, f64::INFINITY);
        for frac_i in 0..6 {
            let frac = 10f64.powf(-3.0 + 0.5 * frac_i as f64);
            let mut m1s = vec![];
            let mut m2s = vec![];
            for r in 0..8u64 {
                let (clean, noisy) = chain(c, Some((snr, 1000 + r + (snr as u64) * 37)));
                let lmn = lambda_max(&noisy, &a1, &a2).unwrap();
                let res = solve_mca(&noisy, &a1, &a2, &SolverConfig::bpd(frac * lmn, 1000)).unwrap();
                let m = interval_errors(&noisy, &res.y1, &res.y2, c.i1, c.i2, Some(&clean)).unwrap();
                m1s.push(m.m1);
                m2s.push(m.m2);
            }
            let mean1 = m1s.iter().sum::<f64>() / 8.0;
            let mean2 = m2s.iter().sum::<f64>() / 8.0;
            best.0 = best.0.min(mean1);
            best.1 = best.1.min(mean2);
        }
        print!(" snr{snr}: m1={:.3} m2={:.3}", best.0, best.1);
    }
    println!();
}

fn main() {
    let base = SyntheticTargetSpec::desk_default();
    let i1 = TimeInterval::new(1e-3, 2e-3).unwrap();
    let i2 = TimeInterval::new(2e-3, 6e-3).unwrap();

    // V0: current default, 20 ms record
    floor_and_trend("V0 n500", &Chain { target: base.clone(), i1, i2 });

    // V1: 10 ms record
    let mut v1 = base.clone();
    v1.n = 250;
    floor_and_trend("V1 n250", &Chain { target: v1.clone(), i1, i2 });

    // V2: 10 ms record, late interval starts past the onsets
    let i2b = TimeInterval::new(2.5e-3, 6e-3).unwrap();
    floor_and_trend("V2 n250 i2=[2.5,6]", &Chain { target: v1.clone(), i1, i2: i2b });

    // V3: V2 with louder resonances
    let mut v3 = v1.clone();
    for r in v3.resonances.iter_mut() {
        r.amplitude *= 1.5;
    }
    floor_and_trend("V3 louder ringdown", &Chain { target: v3, i1, i2: i2b });
}
