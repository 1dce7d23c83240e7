//! Experiment harness for the morphsep toolkit: separation methods, the
//! synthetic-target processing chain, noise/lambda sweeps, canned experiments
//! and deterministic file output.

pub mod experiments;
pub mod output;
pub mod recipes;
pub mod sweep;

pub use experiments::{run_canned_experiment, ExperimentReport, EXPERIMENT_NAMES};
pub use recipes::{EnvelopePairSpec, MethodSpec, TargetRecipe};
pub use sweep::{run_noise_sweep, SweepResult, SweepSpec};
