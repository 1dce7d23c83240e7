use morphsep_core::esp::{EnvelopeSet, EspFrame};
use morphsep_core::signal::relative_error;
use morphsep_core::solver::{lambda_max, solve_mca, SolverConfig, SolverMode};
use morphsep_core::synth::*;

fn main() {
    let mut spec = SyntheticTargetSpec::desk_default();
    spec.pulse = None;
    spec.wavepackets.clear();
    spec.resonances = vec![ResonanceSpec { frequency: 4500.0, decay: 3.5e-3, amplitude: 0.3, start: 1.44e-3 }];
    let target = synthetic_elastic_target(&spec).unwrap();
    let n = spec.n;
    let fs = spec.sample_rate;
    let full_spec = SyntheticTargetSpec::desk_default();
    let a1 = EspFrame::new(EnvelopeSet::rectangular(&full_spec.short_window_durations(), fs, n).unwrap().normalize_parseval().unwrap()).unwrap();
    let a2 = EspFrame::new(EnvelopeSet::exponential(&full_spec.long_time_constants(), fs, n).unwrap().normalize_parseval().unwrap()).unwrap();
    let lm = lambda_max(&target.total, &a1, &a2).unwrap();
    println!("single resonance: lambda_max {lm}");

    for (frac, mu, iters) in [
        (0.25, 1.0, 1000),
        (1.0, 1.0, 1000),
        (4.0, 1.0, 1000),
        (1.0, 0.1, 1000),
        (4.0, 0.1, 1000),
        (16.0, 0.1, 1000),
    ] {
        let cfg = SolverConfig {
            mode: SolverMode::BasisPursuit,
            lambda1: frac * lm,
            lambda2: frac * lm,
            mu,
            max_iters: iters,
            residual_tol: None,
            report_sparse_iterate: true,
        };
        let res = solve_mca(&target.total, &a1, &a2, &cfg).unwrap();
        let le = relative_error(res.y2.samples(), target.long_truth.samples());
        println!(
            "frac={frac} mu={mu} iters={iters}: long err {:.3}%, |y1| {:.4}, resid {:.1e}",
            le * 100.0, res.y1.norm(), res.relative_residual(&target.total)
        );
    }
}
