use morphsep_core::esp::{EnvelopeSet, EspFrame};
use morphsep_core::signal::relative_error;
use morphsep_core::solver::{lambda_max, solve_mca, SolverConfig};
use morphsep_core::synth::{synthetic_elastic_target, SyntheticTargetSpec};
use std::time::Instant;

fn main() {
    let spec = SyntheticTargetSpec::desk_default();
    let target = synthetic_elastic_target(&spec).unwrap();
    let n = spec.n;
    let fs = spec.sample_rate;
    println!("N={n}, fs={fs}, windows {:?}, taus {:?}", spec.short_window_durations(), spec.long_time_constants());
    println!("|total| {}, |short| {}, |long| {}", target.total.norm(), target.short_truth.norm(), target.long_truth.norm());

    let short_set = EnvelopeSet::rectangular(&spec.short_window_durations(), fs, n).unwrap().normalize_parseval().unwrap();
    let long_set = EnvelopeSet::exponential(&spec.long_time_constants(), fs, n).unwrap().normalize_parseval().unwrap();
    let a1 = EspFrame::new(short_set).unwrap();
    let a2 = EspFrame::new(long_set).unwrap();
    let lm = lambda_max(&target.total, &a1, &a2).unwrap();
    println!("lambda_max {lm}");

    for (frac, iters) in [(0.1, 1000), (0.01, 1000), (0.01, 3000), (0.001, 3000)] {
        let t0 = Instant::now();
        let cfg = SolverConfig::bp(frac * lm, iters);
        let res = solve_mca(&target.total, &a1, &a2, &cfg).unwrap();
        let se = relative_error(res.y1.samples(), target.short_truth.samples());
        let le = relative_error(res.y2.samples(), target.long_truth.samples());
        println!(
            "frac={frac} iters={iters}: short err {:.2}%, long err {:.2}%, resid {:.1e}, u1_l1 {:.1}, u2_l1 {:.1}, {:?}",
            se * 100.0, le * 100.0, res.relative_residual(&target.total),
            res.u1.as_ref().unwrap().l1_norm(), res.u2.as_ref().unwrap().l1_norm(), t0.elapsed()
        );
    }
}
