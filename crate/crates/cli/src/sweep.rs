//! Noise/lambda sweep harness: for every (SNR, realization, lambda) cell,
//! generate a seeded noisy realization, separate it with BPD and score the
//! components against the clean chain output.

use serde::{Deserialize, Serialize};

use morphsep_core::error::{Error, Result};
use morphsep_core::metrics::{interval_errors, mean_std};
use morphsep_core::solver::{lambda_max, solve_mca, SolverConfig};

use crate::recipes::{MethodSpec, TargetRecipe};

/// Default lambda grid: `10^(-3 + 0.25 j)` of lambda_max for j = 0..=11,
/// spanning 0.001 to 0.5623.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..12).map(|j| 10f64.powf(-3.0 + 0.25 * j as f64)).collect()
}

fn default_iterations() -> usize {
    1000
}

fn default_mu() -> f64 {
    1.0
}

/// Full description of a noise sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Noise levels in dB, measured against the pre-filter signal power.
    pub snr_grid_db: Vec<f64>,
    /// Common-lambda values as fractions of the per-realization lambda_max.
    #[serde(default = "default_lambda_grid")]
    pub lambda_fracs: Vec<f64>,
    pub realizations: usize,
    pub base_seed: u64,
    pub method: MethodSpec,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "TargetRecipe::desk_default")]
    pub recipe: TargetRecipe,
}

impl SweepSpec {
    /// Desk-scale default over the FFT method.
    pub fn desk_default() -> Self {
        Self {
            snr_grid_db: vec![10.0, 20.0, 30.0, 40.0],
            lambda_fracs: default_lambda_grid(),
            realizations: 20,
            base_seed: 0,
            method: MethodSpec::Fft,
            iterations: default_iterations(),
            mu: default_mu(),
            recipe: TargetRecipe::desk_default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_grid_db.is_empty() || self.lambda_fracs.is_empty() {
            return Err(Error::InvalidParameter("sweep grids must be nonempty".into()));
        }
        if self.realizations == 0 {
            return Err(Error::InvalidParameter("sweep needs realizations >= 1".into()));
        }
        self.recipe.validate()
    }
}

/// One (snr, lambda, realization) cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRecord {
    pub snr_db: f64,
    pub lambda_frac: f64,
    pub realization: usize,
    /// Absent when the solver diverged on this cell.
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub diverged: bool,
}

/// Mean/std over realizations for one (snr, lambda) grid point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepAggregate {
    pub snr_db: f64,
    pub lambda_frac: f64,
    pub mean_m1: f64,
    pub std_m1: f64,
    pub mean_m2: f64,
    pub std_m2: f64,
    pub count: usize,
    pub diverged_count: usize,
}

/// Per-SNR minimum-error lambda, chosen independently for each metric.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BestLambda {
    pub snr_db: f64,
    pub lambda_frac_m1: f64,
    pub mean_m1: f64,
    pub lambda_frac_m2: f64,
    pub mean_m2: f64,
}

/// Raw records plus aggregates; aggregates are recomputable from the records.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
    pub aggregates: Vec<SweepAggregate>,
    pub best_lambda: Vec<BestLambda>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-cell seed; cells are independent of evaluation order and
/// worker count.
pub fn cell_seed(base_seed: u64, snr_index: usize, realization: usize) -> u64 {
    let mut s = splitmix64(base_seed);
    s = splitmix64(s ^ (snr_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    splitmix64(s ^ (realization as u64).wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Run the sweep described by `spec`.
///
/// Each realization draws its noise from [`cell_seed`], so re-running any
/// subset of the grid reproduces identical records. Diverged cells are
/// recorded and excluded from the aggregates.
pub fn run_noise_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let processed = spec.recipe.clean()?;
    let n = processed.clean.len();
    let fs = processed.clean.sample_rate();
    let (a1, a2) = spec.method.build_frames(n, fs)?;
    let i1 = spec.recipe.interval1;
    let i2 = spec.recipe.interval2;

    let mut records = Vec::with_capacity(spec.snr_grid_db.len() * spec.realizations * spec.lambda_fracs.len());
    for (snr_index, &snr_db) in spec.snr_grid_db.iter().enumerate() {
        for realization in 0..spec.realizations {
            let seed = cell_seed(spec.base_seed, snr_index, realization);
            let noisy = spec.recipe.noisy(snr_db, seed)?;
            let lm = lambda_max(&noisy, a1.as_ref(), a2.as_ref())?;
            for &lambda_frac in &spec.lambda_fracs {
                let cfg = SolverConfig::bpd(lambda_frac * lm, spec.iterations).with_mu(spec.mu);
                let record = match solve_mca(&noisy, a1.as_ref(), a2.as_ref(), &cfg) {
                    Ok(res) => {
                        let metrics =
                            interval_errors(&noisy, &res.y1, &res.y2, i1, i2, Some(&processed.clean))?;
                        SweepRecord {
                            snr_db,
                            lambda_frac,
                            realization,
                            m1: Some(metrics.m1),
                            m2: Some(metrics.m2),
                            diverged: false,
                        }
                    }
                    Err(Error::NumericalDivergence { .. }) => SweepRecord {
                        snr_db,
                        lambda_frac,
                        realization,
                        m1: None,
                        m2: None,
                        diverged: true,
                    },
                    Err(e) => return Err(e),
                };
                records.push(record);
            }
        }
    }

    let aggregates = aggregate_records(&records, &spec.snr_grid_db, &spec.lambda_fracs);
    let best_lambda = best_lambdas(&aggregates, &spec.snr_grid_db);
    Ok(SweepResult { records, aggregates, best_lambda })
}

/// Group records by (snr, lambda) and compute means and standard deviations
/// over the non-diverged realizations.
pub fn aggregate_records(
    records: &[SweepRecord],
    snr_grid: &[f64],
    lambda_fracs: &[f64],
) -> Vec<SweepAggregate> {
    let mut out = Vec::with_capacity(snr_grid.len() * lambda_fracs.len());
    for &snr_db in snr_grid {
        for &lambda_frac in lambda_fracs {
            let cell: Vec<&SweepRecord> = records
                .iter()
                .filter(|r| r.snr_db == snr_db && r.lambda_frac == lambda_frac)
                .collect();
            let m1s: Vec<f64> = cell.iter().filter_map(|r| r.m1).collect();
            let m2s: Vec<f64> = cell.iter().filter_map(|r| r.m2).collect();
            let (mean_m1, std_m1) = mean_std(&m1s);
            let (mean_m2, std_m2) = mean_std(&m2s);
            out.push(SweepAggregate {
                snr_db,
                lambda_frac,
                mean_m1,
                std_m1,
                mean_m2,
                std_m2,
                count: m1s.len(),
                diverged_count: cell.iter().filter(|r| r.diverged).count(),
            });
        }
    }
    out
}

fn best_lambdas(aggregates: &[SweepAggregate], snr_grid: &[f64]) -> Vec<BestLambda> {
    snr_grid
        .iter()
        .map(|&snr_db| {
            let cells: Vec<&SweepAggregate> =
                aggregates.iter().filter(|a| a.snr_db == snr_db && a.count > 0).collect();
            let best_m1 = cells
                .iter()
                .min_by(|a, b| a.mean_m1.total_cmp(&b.mean_m1))
                .expect("nonempty lambda grid");
            let best_m2 = cells
                .iter()
                .min_by(|a, b| a.mean_m2.total_cmp(&b.mean_m2))
                .expect("nonempty lambda grid");
            BestLambda {
                snr_db,
                lambda_frac_m1: best_m1.lambda_frac,
                mean_m1: best_m1.mean_m1,
                lambda_frac_m2: best_m2.lambda_frac,
                mean_m2: best_m2.mean_m2,
            }
        })
        .collect()
}
