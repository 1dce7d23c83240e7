use morphsep_core::esp::{EnvelopeSet, EspFrame};
use morphsep_core::signal::relative_error;
use morphsep_core::solver::{lambda_max, solve_mca, SolverConfig, SolverMode};
use morphsep_core::synth::*;

fn run(name: &str, spec: &SyntheticTargetSpec) {
    let target = synthetic_elastic_target(spec).unwrap();
    let n = spec.n;
    let fs = spec.sample_rate;
    let a1 = EspFrame::new(EnvelopeSet::rectangular(&spec.short_window_durations(), fs, n).unwrap().normalize_parseval().unwrap()).unwrap();
    let a2 = EspFrame::new(EnvelopeSet::exponential(&spec.long_time_constants(), fs, n).unwrap().normalize_parseval().unwrap()).unwrap();
    let lm = lambda_max(&target.total, &a1, &a2).unwrap();
    let cfg = SolverConfig {
        mode: SolverMode::BasisPursuit,
        lambda1: lm, lambda2: lm, mu: 0.1,
        max_iters: 1000, residual_tol: None, report_sparse_iterate: true,
    };
    let res = solve_mca(&target.total, &a1, &a2, &cfg).unwrap();
    let se = relative_error(res.y1.samples(), target.short_truth.samples());
    let le = relative_error(res.y2.samples(), target.long_truth.samples());
    println!("{name}: short err {:.2}%, long err {:.2}%", se*100.0, le*100.0);
}

fn main() {
    // variant A: resonances start after the short events (staggered onsets)
    let mut a = SyntheticTargetSpec::desk_default();
    a.resonances = vec![
        ResonanceSpec { frequency: 3000.0, decay: 2.0e-3, amplitude: 0.40, start: 1.96e-3 },
        ResonanceSpec { frequency: 4500.0, decay: 3.5e-3, amplitude: 0.30, start: 2.04e-3 },
        ResonanceSpec { frequency: 6500.0, decay: 6.0e-3, amplitude: 0.25, start: 2.12e-3 },
        ResonanceSpec { frequency: 8000.0, decay: 10.0e-3, amplitude: 0.18, start: 2.20e-3 },
    ];
    run("A staggered", &a);

    // variant B: staggered + shorter windows (pulse 0.2 ms, packets 0.12/0.2 ms)
    let mut b = a.clone();
    b.pulse = Some(PulseSpec { arrival: 1.32e-3, duration: 0.2e-3, band: (4_000.0, 10_000.0), amplitude: 1.0 });
    run("B staggered+short-windows", &b);

    // variant C: partial overlap (resonances start among the last packets)
    let mut c = a.clone();
    for (i, r) in c.resonances.iter_mut().enumerate() {
        r.start = 1.80e-3 + 0.08e-3 * i as f64;
    }
    run("C partial overlap", &c);
}
