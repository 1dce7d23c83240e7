//! Morphological component analysis of acoustic time series.
//!
//! The toolkit decomposes a measured signal into short-duration and
//! long-duration components by finding coefficients that are sparse under two
//! competing tight-frame representations. Two frame families are provided:
//! the identity/unitary-DFT pair (`frame`) and enveloped-sinusoid frames
//! built from arbitrary envelope sets (`esp`). The `solver` module runs dual
//! basis pursuit or basis pursuit denoising over any such pair, `synth` and
//! `process` generate the analytic test signals and the pulse processing
//! chain, `metrics` scores separations on time intervals, and `imaging`
//! carries the separation through circular-aperture backprojection.

pub mod error;
pub mod esp;
pub mod frame;
pub mod imaging;
pub mod io;
pub mod metrics;
pub mod process;
pub mod signal;
pub mod solver;
pub mod synth;

pub use error::{Error, Result};
pub use esp::{EnvelopeKind, EnvelopeSet, EnvelopeSetSpec, EspCoefficients, EspFrame};
pub use frame::{soft_threshold, CoefficientSet, DftFrame, Frame, IdentityFrame};
pub use imaging::{
    backproject, ingest_scan, k_space, normalized_target_strength, separate_scan, synthesize_scan,
    CircularScan, GridSpec, SasImage, ScanGeometry, ScanSpec,
};
pub use metrics::{interval_errors, IntervalMetrics, TimeInterval};
pub use process::{add_awgn, butterworth_bandlimit, convolve_response, matched_filter};
pub use signal::{relative_error, Signal};
pub use solver::{
    lambda_max, optimality_certificate, solve_mca, solve_mca_batch, SeparationResult, SolverConfig,
    SolverMode,
};
pub use synth::{
    driven_oscillator, lfm_chirp, spike_plus_sine, synthetic_elastic_target, OscillatorSpec,
    SyntheticTargetSpec,
};
