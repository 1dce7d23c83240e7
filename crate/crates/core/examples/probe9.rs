use morphsep_core::esp::{EnvelopeSet, EspFrame};
use morphsep_core::signal::relative_error;
use morphsep_core::solver::{lambda_max, solve_mca, SolverConfig, SolverMode};
use morphsep_core::synth::*;

fn run(name: &str, spec: &SyntheticTargetSpec, iters: usize) {
    let target = synthetic_elastic_target(spec).unwrap();
    let n = spec.n;
    let fs = spec.sample_rate;
    let a1 = EspFrame::new(EnvelopeSet::rectangular(&spec.short_window_durations(), fs, n).unwrap().normalize_parseval().unwrap()).unwrap();
    let a2 = EspFrame::new(EnvelopeSet::exponential(&spec.long_time_constants(), fs, n).unwrap().normalize_parseval().unwrap()).unwrap();
    let lm = lambda_max(&target.total, &a1, &a2).unwrap();
    let cfg = SolverConfig {
        mode: SolverMode::BasisPursuit,
        lambda1: lm, lambda2: lm, mu: 0.1,
        max_iters: iters, residual_tol: None, report_sparse_iterate: true,
    };
    let res = solve_mca(&target.total, &a1, &a2, &cfg).unwrap();
    let se = relative_error(res.y1.samples(), target.short_truth.samples());
    let le = relative_error(res.y2.samples(), target.long_truth.samples());
    println!("{name} (iters={iters}): short err {:.2}%, long err {:.2}%", se*100.0, le*100.0);
}

fn staggered() -> SyntheticTargetSpec {
    let mut a = SyntheticTargetSpec::desk_default();
    a.resonances = vec![
        ResonanceSpec { frequency: 3000.0, decay: 2.0e-3, amplitude: 0.40, start: 1.96e-3 },
        ResonanceSpec { frequency: 4500.0, decay: 3.5e-3, amplitude: 0.30, start: 2.04e-3 },
        ResonanceSpec { frequency: 6500.0, decay: 6.0e-3, amplitude: 0.25, start: 2.12e-3 },
        ResonanceSpec { frequency: 8000.0, decay: 10.0e-3, amplitude: 0.18, start: 2.20e-3 },
    ];
    a
}

fn main() {
    run("A staggered", &staggered(), 2000);

    // D: widen the gap between short events and onsets
    let mut d = staggered();
    d.wavepackets = vec![
        WavepacketSpec { arrival: 1.48e-3, duration: 0.2e-3, center_freq: 7_000.0, amplitude: 0.45 },
        WavepacketSpec { arrival: 1.64e-3, duration: 0.12e-3, center_freq: 5_500.0, amplitude: 0.30 },
    ];
    for (i, r) in d.resonances.iter_mut().enumerate() {
        r.start = 2.08e-3 + 0.08e-3 * i as f64;
    }
    run("D wider gap", &d, 1000);

    // E: D plus narrower pulse band (less atom spread)
    let mut e = d.clone();
    e.pulse = Some(PulseSpec { arrival: 1.32e-3, duration: 0.4e-3, band: (5_000.0, 8_000.0), amplitude: 1.0 });
    run("E narrow band", &e, 1000);
}
