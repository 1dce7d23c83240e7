use morphsep_core::esp::{EnvelopeSet, EspFrame};
use morphsep_core::signal::relative_error;
use morphsep_core::solver::{lambda_max, solve_mca, SolverConfig};
use morphsep_core::synth::*;

fn run(name: &str, spec: &SyntheticTargetSpec) {
    let target = synthetic_elastic_target(spec).unwrap();
    let n = spec.n;
    let fs = spec.sample_rate;
    let windows = if spec.short_window_durations().is_empty() { vec![0.2e-3] } else { spec.short_window_durations() };
    let taus = if spec.long_time_constants().is_empty() { vec![2e-3] } else { spec.long_time_constants() };
    let a1 = EspFrame::new(EnvelopeSet::rectangular(&windows, fs, n).unwrap().normalize_parseval().unwrap()).unwrap();
    let a2 = EspFrame::new(EnvelopeSet::exponential(&taus, fs, n).unwrap().normalize_parseval().unwrap()).unwrap();
    let lm = lambda_max(&target.total, &a1, &a2).unwrap();
    let cfg = SolverConfig::bp(0.01 * lm, 1000);
    let res = solve_mca(&target.total, &a1, &a2, &cfg).unwrap();
    let se = relative_error(res.y1.samples(), target.short_truth.samples());
    let le = relative_error(res.y2.samples(), target.long_truth.samples());
    // energy split of y1 against short truth energy
    println!("{name}: short err {:.2}% (|短|={:.3}, |y1|={:.3}), long err {:.2}% (|long|={:.3}, |y2|={:.3})",
        se*100.0, target.short_truth.norm(), res.y1.norm(), le*100.0, target.long_truth.norm(), res.y2.norm());
}

fn main() {
    let full = SyntheticTargetSpec::desk_default();

    let mut resonances_only = full.clone();
    resonances_only.pulse = None;
    resonances_only.wavepackets.clear();
    run("resonances-only", &resonances_only);

    let mut single_res = resonances_only.clone();
    single_res.resonances = vec![ResonanceSpec { frequency: 4500.0, decay: 3.5e-3, amplitude: 0.3, start: 1.44e-3 }];
    run("single-resonance", &single_res);

    let mut short_only = full.clone();
    short_only.resonances.clear();
    run("short-only", &short_only);

    let mut wavepackets_only = full.clone();
    wavepackets_only.resonances.clear();
    wavepackets_only.pulse = None;
    run("wavepackets-only", &wavepackets_only);

    run("full", &full);
}
