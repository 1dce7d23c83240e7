use morphsep_core::esp::{EnvelopeSet, EspFrame};
use morphsep_core::signal::relative_error;
use morphsep_core::solver::{lambda_max, solve_mca, SolverConfig, SolverMode};
use morphsep_core::synth::*;

fn run(name: &str, spec_events: &SyntheticTargetSpec) {
    let full = SyntheticTargetSpec::desk_default();
    let target = synthetic_elastic_target(spec_events).unwrap();
    let n = full.n;
    let fs = full.sample_rate;
    let a1 = EspFrame::new(EnvelopeSet::rectangular(&full.short_window_durations(), fs, n).unwrap().normalize_parseval().unwrap()).unwrap();
    let a2 = EspFrame::new(EnvelopeSet::exponential(&full.long_time_constants(), fs, n).unwrap().normalize_parseval().unwrap()).unwrap();
    let lm = lambda_max(&target.total, &a1, &a2).unwrap();
    let cfg = SolverConfig {
        mode: SolverMode::BasisPursuit,
        lambda1: lm, lambda2: lm, mu: 0.1,
        max_iters: 1000, residual_tol: None, report_sparse_iterate: true,
    };
    let res = solve_mca(&target.total, &a1, &a2, &cfg).unwrap();
    let se = relative_error(res.y1.samples(), target.short_truth.samples());
    let le = relative_error(res.y2.samples(), target.long_truth.samples());
    println!("{name}: short err {:.2}% (|short|={:.3}, |y1|={:.3}), long err {:.2}% (|long|={:.3}, |y2|={:.3})",
        se*100.0, target.short_truth.norm(), res.y1.norm(), le*100.0, target.long_truth.norm(), res.y2.norm());
}

fn main() {
    let full = SyntheticTargetSpec::desk_default();

    let mut pulse_only = full.clone();
    pulse_only.resonances.clear();
    pulse_only.wavepackets.clear();
    run("pulse-only", &pulse_only);

    let mut resonances_only = full.clone();
    resonances_only.pulse = None;
    resonances_only.wavepackets.clear();
    run("resonances-only", &resonances_only);

    run("full", &full);
}
