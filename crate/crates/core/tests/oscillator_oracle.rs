//! Guards the closed-form oscillator decomposition with an independent
//! fixed-step Runge-Kutta integration of the differential equation.

use morphsep_core::synth::{driven_oscillator, OscillatorSpec};

/// Classic RK4 on the first-order system (y, y') with `substeps` steps per
/// output sample; returns the sampled displacement.
fn integrate_oscillator(spec: &OscillatorSpec, substeps: usize) -> Vec<f64> {
    let w = 2.0 * std::f64::consts::PI * spec.f;
    let w0 = 2.0 * std::f64::consts::PI * spec.f0;
    let damping = 2.0 / spec.tau;
    let accel = |t: f64, y: f64, v: f64| -> f64 {
        spec.forcing_amplitude * (w * t).sin() - damping * v - w0 * w0 * y
    };

    let dt = 1.0 / (spec.sample_rate * substeps as f64);
    let mut y = 0.0;
    let mut v = 0.0;
    let mut t = 0.0;
    let mut out = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        out.push(y);
        for _ in 0..substeps {
            let k1y = v;
            let k1v = accel(t, y, v);
            let k2y = v + 0.5 * dt * k1v;
            let k2v = accel(t + 0.5 * dt, y + 0.5 * dt * k1y, v + 0.5 * dt * k1v);
            let k3y = v + 0.5 * dt * k2v;
            let k3v = accel(t + 0.5 * dt, y + 0.5 * dt * k2y, v + 0.5 * dt * k2v);
            let k4y = v + dt * k3v;
            let k4v = accel(t + dt, y + dt * k3y, v + dt * k3v);
            y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            t += dt;
        }
    }
    out
}

#[test]
fn closed_form_matches_numerical_integration() {
    let spec = OscillatorSpec {
        tau: 2e-3,
        f0: 20_000.0,
        f: 15_000.0,
        forcing_amplitude: 1e10,
        sample_rate: 100_000.0,
        n: 1000,
    };
    let closed = driven_oscillator(&spec).unwrap();
    let numeric = integrate_oscillator(&spec, 1024);

    let mut diff = 0.0;
    let mut denom = 0.0;
    for (c, n) in closed.total.samples().iter().zip(numeric.iter()) {
        diff += (c.re - n) * (c.re - n);
        denom += n * n;
    }
    let rel = (diff / denom).sqrt();
    assert!(rel < 1e-8, "closed form vs RK4 relative error {rel}");
}

#[test]
fn closed_form_matches_integration_off_the_reference_parameters() {
    let spec = OscillatorSpec {
        tau: 5e-3,
        f0: 7_000.0,
        f: 9_500.0,
        forcing_amplitude: 3.2e8,
        sample_rate: 50_000.0,
        n: 600,
    };
    let closed = driven_oscillator(&spec).unwrap();
    let numeric = integrate_oscillator(&spec, 1024);
    let mut diff = 0.0;
    let mut denom = 0.0;
    for (c, n) in closed.total.samples().iter().zip(numeric.iter()) {
        diff += (c.re - n) * (c.re - n);
        denom += n * n;
    }
    let rel = (diff / denom).sqrt();
    assert!(rel < 1e-8, "closed form vs RK4 relative error {rel}");
}

#[test]
fn homogeneous_part_decays_and_particular_part_persists() {
    let spec = OscillatorSpec {
        tau: 2e-3,
        f0: 20_000.0,
        f: 15_000.0,
        forcing_amplitude: 1e10,
        sample_rate: 100_000.0,
        n: 1000,
    };
    let out = driven_oscillator(&spec).unwrap();
    // by 10 ms the transient has decayed by e^{-5}
    let early: f64 = out.homogeneous.samples()[..100].iter().map(|s| s.norm_sqr()).sum();
    let late: f64 = out.homogeneous.samples()[900..].iter().map(|s| s.norm_sqr()).sum();
    assert!(late < 1e-3 * early, "transient should decay: early {early}, late {late}");

    let p_early: f64 = out.particular.samples()[..100].iter().map(|s| s.norm_sqr()).sum();
    let p_late: f64 = out.particular.samples()[900..].iter().map(|s| s.norm_sqr()).sum();
    assert!(
        (p_late / p_early - 1.0).abs() < 0.2,
        "steady state should persist: early {p_early}, late {p_late}"
    );
}
