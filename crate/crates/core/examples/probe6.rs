use morphsep_core::esp::{EnvelopeSet, EspFrame};
use morphsep_core::signal::relative_error;
use morphsep_core::solver::{lambda_max, solve_mca, SolverConfig, SolverMode};
use morphsep_core::synth::*;
use std::time::Instant;

fn main() {
    let spec = SyntheticTargetSpec::desk_default();
    let target = synthetic_elastic_target(&spec).unwrap();
    let n = spec.n;
    let fs = spec.sample_rate;
    let a1 = EspFrame::new(EnvelopeSet::rectangular(&spec.short_window_durations(), fs, n).unwrap().normalize_parseval().unwrap()).unwrap();
    let a2 = EspFrame::new(EnvelopeSet::exponential(&spec.long_time_constants(), fs, n).unwrap().normalize_parseval().unwrap()).unwrap();
    let lm = lambda_max(&target.total, &a1, &a2).unwrap();

    for (frac, mu, iters) in [
        (1.0, 0.1, 1000),
        (2.0, 0.1, 1000),
        (0.5, 0.05, 1000),
        (1.0, 0.05, 1000),
        (1.0, 0.1, 2000),
    ] {
        let t0 = Instant::now();
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
        let se = relative_error(res.y1.samples(), target.short_truth.samples());
        let le = relative_error(res.y2.samples(), target.long_truth.samples());
        println!(
            "frac={frac} mu={mu} iters={iters}: short {:.2}%, long {:.2}%, resid {:.1e}, {:?}",
            se * 100.0, le * 100.0, res.relative_residual(&target.total), t0.elapsed()
        );
    }
}
