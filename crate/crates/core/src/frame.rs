//! Tight-frame synthesis/analysis operators and the soft-thresholding
//! proximal operator used by the separation solver.
//!
//! A tight frame satisfies `A A* = p I` for a constant `p > 0`; `synthesize`
//! implements `A` (coefficients to signal) and `analyze` implements the
//! adjoint `A*` (signal to coefficients).

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Synthesis/analysis operator pair for a tight frame.
///
/// Implementations must be immutable after construction so a single frame can
/// be shared across concurrent solves; `analyze` and `synthesize` are pure
/// functions of their inputs.
pub trait Frame: Send + Sync {
    /// Signal-domain dimension `N`.
    fn signal_dim(&self) -> usize;

    /// Total coefficient count `M`.
    fn coeff_dim(&self) -> usize;

    /// Tight-frame constant `p` in `A A* = p I`.
    fn frame_constant(&self) -> f64;

    /// Short identifier recorded alongside coefficient sets.
    fn id(&self) -> String;

    /// Apply the analysis operator `A*`, writing `coeff_dim` coefficients.
    fn analyze_into(&self, signal: &[Complex64], out: &mut [Complex64]) -> Result<()>;

    /// Apply the synthesis operator `A`, writing `signal_dim` samples.
    fn synthesize_into(&self, coeffs: &[Complex64], out: &mut [Complex64]) -> Result<()>;

    /// Allocating wrapper around [`Frame::analyze_into`].
    fn analyze(&self, signal: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeff_dim()];
        self.analyze_into(signal, &mut out)?;
        Ok(out)
    }

    /// Allocating wrapper around [`Frame::synthesize_into`].
    fn synthesize(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.signal_dim()];
        self.synthesize_into(coeffs, &mut out)?;
        Ok(out)
    }
}

/// Transform-domain coefficients tagged with the frame that produced them.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub values: Vec<Complex64>,
    pub frame_id: String,
}

impl CoefficientSet {
    pub fn new(values: Vec<Complex64>, frame_id: impl Into<String>) -> Self {
        Self { values, frame_id: frame_id.into() }
    }

    /// l1 norm (sum of moduli).
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum()
    }

    /// l2 norm.
    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn check_lens(name: &str, got_sig: usize, want_sig: usize, got_coeff: usize, want_coeff: usize) -> Result<()> {
    if got_sig != want_sig {
        return Err(Error::DimensionMismatch(format!(
            "{name}: signal length {got_sig}, frame expects {want_sig}"
        )));
    }
    if got_coeff != want_coeff {
        return Err(Error::DimensionMismatch(format!(
            "{name}: coefficient length {got_coeff}, frame expects {want_coeff}"
        )));
    }
    Ok(())
}

/// The identity frame: `analyze` and `synthesize` both copy, `p = 1`.
#[derive(Debug, Clone)]
pub struct IdentityFrame {
    n: usize,
}

impl IdentityFrame {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("identity frame requires N >= 1".into()));
        }
        Ok(Self { n })
    }
}

impl Frame for IdentityFrame {
    fn signal_dim(&self) -> usize {
        self.n
    }

    fn coeff_dim(&self) -> usize {
        self.n
    }

    fn frame_constant(&self) -> f64 {
        1.0
    }

    fn id(&self) -> String {
        format!("identity(N={})", self.n)
    }

    fn analyze_into(&self, signal: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        check_lens("identity analyze", signal.len(), self.n, out.len(), self.n)?;
        out.copy_from_slice(signal);
        Ok(())
    }

    fn synthesize_into(&self, coeffs: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        check_lens("identity synthesize", out.len(), self.n, coeffs.len(), self.n)?;
        out.copy_from_slice(coeffs);
        Ok(())
    }
}

/// The unitary DFT frame: `analyze` is the forward unitary DFT (1/sqrt(N)
/// scaling), `synthesize` its inverse, `p = 1`.
///
/// Any consistent DFT normalization would do; the unitary choice keeps both
/// FFT-MCA frames at `p = 1` so a common lambda weights them evenly. A
/// different normalization only rescales the effective lambda.
pub struct DftFrame {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl DftFrame {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("DFT frame requires N >= 1".into()));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            scale: 1.0 / (n as f64).sqrt(),
        })
    }
}

impl std::fmt::Debug for DftFrame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DftFrame").field("n", &self.n).finish()
    }
}

impl Frame for DftFrame {
    fn signal_dim(&self) -> usize {
        self.n
    }

    fn coeff_dim(&self) -> usize {
        self.n
    }

    fn frame_constant(&self) -> f64 {
        1.0
    }

    fn id(&self) -> String {
        format!("dft(N={})", self.n)
    }

    fn analyze_into(&self, signal: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        check_lens("dft analyze", signal.len(), self.n, out.len(), self.n)?;
        out.copy_from_slice(signal);
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.forward.get_inplace_scratch_len()];
        self.forward.process_with_scratch(out, &mut scratch);
        for v in out.iter_mut() {
            *v *= self.scale;
        }
        Ok(())
    }

    fn synthesize_into(&self, coeffs: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        check_lens("dft synthesize", out.len(), self.n, coeffs.len(), self.n)?;
        out.copy_from_slice(coeffs);
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.inverse.get_inplace_scratch_len()];
        self.inverse.process_with_scratch(out, &mut scratch);
        for v in out.iter_mut() {
            *v *= self.scale;
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn soft_unchecked(x: Complex64, threshold: f64) -> Complex64 {
    // compare on squared magnitudes so sub-threshold inputs skip the sqrt
    let mag_sq = x.re * x.re + x.im * x.im;
    if mag_sq > threshold * threshold {
        x * (1.0 - threshold / mag_sq.sqrt())
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Complex soft threshold: shrinks the modulus by `threshold` and preserves
/// phase; inputs with `|x| <= threshold` map to exactly zero.
pub fn soft_threshold(x: Complex64, threshold: f64) -> Result<Complex64> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "soft threshold must be nonnegative, got {threshold}"
        )));
    }
    Ok(soft_unchecked(x, threshold))
}

/// Element-wise soft threshold over a coefficient slice.
pub fn soft_threshold_in_place(values: &mut [Complex64], threshold: f64) -> Result<()> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "soft threshold must be nonnegative, got {threshold}"
        )));
    }
    for v in values.iter_mut() {
        *v = soft_unchecked(*v, threshold);
    }
    Ok(())
}
