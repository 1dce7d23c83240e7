use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use morphsep_cli::experiments::{run_canned_experiment, EXPERIMENT_NAMES};
use morphsep_cli::output::{self, write_json};
use morphsep_cli::recipes::{EnvelopePairSpec, MethodSpec, TargetRecipe};
use morphsep_cli::sweep::{run_noise_sweep, SweepSpec};
use morphsep_core::imaging::{
    backproject, export_scan, ingest_scan, k_space, normalized_target_strength, separate_scan,
    GridSpec, ScanSpec,
};
use morphsep_core::io::{read_signal, read_signal_csv, write_signal};
use morphsep_core::metrics::{interval_errors, TimeInterval};
use morphsep_core::solver::{lambda_max, solve_mca, SolverConfig, SolverMode};
use morphsep_core::synth::{
    driven_oscillator, lfm_chirp, spike_plus_sine, synthetic_elastic_target, OscillatorSpec,
    SyntheticTargetSpec,
};

/// Signal separation toolkit: split acoustic time series into short-duration
/// and long-duration components via sparse optimization over tight frames.
#[derive(Parser)]
#[command(name = "morphsep", version, about)]
struct Cli {
    /// Output directory (falls back to $MORPHSEP_OUT, then ./out)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit synthetic signals or scans with known ground truth
    Generate {
        #[command(subcommand)]
        what: GenerateCmd,
    },
    /// Separate one signal CSV or a whole scan directory
    Separate(SeparateArgs),
    /// Run a noise/lambda sweep described by a JSON spec
    Sweep {
        /// Sweep spec JSON; omitted means the desk-scale default
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Override the spec's base seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Backproject a scan directory into an image plus target-strength and
    /// k-space products
    Image {
        scan: PathBuf,
        #[arg(long, default_value_t = 128)]
        pixels: usize,
        /// Half-width of the imaged square, meters
        #[arg(long, default_value_t = 0.15)]
        extent: f64,
    },
    /// Run a canned experiment with embedded pass/fail thresholds
    Experiment {
        /// One of the documented experiment names
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum GenerateCmd {
    /// Spike plus sinusoid mixture with exact components
    SpikeSine {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 10_000.0)]
        sample_rate: f64,
        #[arg(long, default_value_t = 50)]
        spike_index: usize,
        #[arg(long, default_value_t = 1000.0)]
        tone_freq: f64,
    },
    /// Zero-state driven oscillator split into transient and steady state
    Oscillator {
        #[arg(long, default_value_t = 2e-3)]
        tau: f64,
        #[arg(long, default_value_t = 20_000.0)]
        f0: f64,
        #[arg(long, default_value_t = 15_000.0)]
        f: f64,
        #[arg(long, default_value_t = 1e10)]
        forcing: f64,
        #[arg(long, default_value_t = 100_000.0)]
        sample_rate: f64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
    /// Synthetic elastic target with exact short/long ground truth
    Target {
        /// Target spec JSON; omitted means the desk-scale default
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Also run the chirp/matched-filter chain and emit the processed
        /// clean signal
        #[arg(long)]
        processed: bool,
    },
    /// Linear FM chirp
    Chirp {
        #[arg(long)]
        f_start: f64,
        #[arg(long)]
        f_end: f64,
        #[arg(long)]
        duration: f64,
        #[arg(long)]
        sample_rate: f64,
    },
    /// Circular-aperture point-target scan
    Scan {
        /// Scan spec JSON; omitted means the desk-scale default
        #[arg(long)]
        spec: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Fft,
    Esp,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Bp,
    Bpd,
}

#[derive(Args)]
struct SeparateArgs {
    /// Signal CSV (with a JSON sidecar header) or a scan directory holding a
    /// manifest.json
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Fft)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Bp)]
    mode: ModeArg,
    /// Common lambda as a fraction of lambda_max
    #[arg(long, default_value_t = 0.01)]
    lambda_frac: f64,
    /// Absolute lambda for the first frame (overrides --lambda-frac)
    #[arg(long)]
    lambda1: Option<f64>,
    /// Absolute lambda for the second frame (overrides --lambda-frac)
    #[arg(long)]
    lambda2: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    /// JSON file holding explicit short/long envelope sets (implies esp)
    #[arg(long)]
    envelopes: Option<PathBuf>,
    /// Sampling rate for a headerless CSV
    #[arg(long)]
    sample_rate: Option<f64>,
    /// Early-time interval in seconds, e.g. --interval1 1e-3 2e-3
    #[arg(long, num_args = 2, value_names = ["START", "END"])]
    interval1: Option<Vec<f64>>,
    /// Late-time interval in seconds
    #[arg(long, num_args = 2, value_names = ["START", "END"])]
    interval2: Option<Vec<f64>>,
}

fn out_dir(cli_out: &Option<PathBuf>) -> PathBuf {
    cli_out
        .clone()
        .or_else(|| std::env::var_os("MORPHSEP_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn read_json_file<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let file = std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    serde_json::from_reader(std::io::BufReader::new(file))
        .with_context(|| format!("cannot parse {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = out_dir(&cli.out);
    match run(cli.command, &out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command, out: &Path) -> anyhow::Result<ExitCode> {
    match command {
        Command::Generate { what } => {
            generate(what, out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Separate(args) => {
            separate(args, out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { spec, seed } => {
            let mut spec: SweepSpec = match spec {
                Some(path) => read_json_file(&path)?,
                None => SweepSpec::desk_default(),
            };
            if let Some(seed) = seed {
                spec.base_seed = seed;
            }
            let result = run_noise_sweep(&spec)?;
            std::fs::create_dir_all(out)?;
            write_json(&out.join("sweep_spec.json"), &spec)?;
            output::write_sweep(out, &result)?;
            println!("sweep: {} records -> {}", result.records.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Image { scan, pixels, extent } => {
            let scan = ingest_scan(&scan)?;
            let grid = GridSpec { pixels, extent_m: extent };
            let image = backproject(&scan, grid)?;
            output::write_image(out, "image", &image)?;
            output::write_target_strength(out, "nts", &normalized_target_strength(&scan)?)?;
            output::write_magnitude_grid(out, "kspace", &k_space(&image))?;
            println!("image: {}x{} pixels -> {}", image.nx, image.ny, out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment { name, seed } => {
            if !EXPERIMENT_NAMES.contains(&name.as_str()) {
                eprintln!(
                    "error: unknown experiment '{name}'; valid names: {}",
                    EXPERIMENT_NAMES.join(", ")
                );
                return Ok(ExitCode::from(2));
            }
            let report = run_canned_experiment(&name, out, seed)?;
            for check in &report.checks {
                println!(
                    "{}: {} = {:.6e} (threshold {:.3e}) -> {}",
                    report.name,
                    check.name,
                    check.value,
                    check.threshold,
                    if check.pass { "pass" } else { "FAIL" }
                );
            }
            if report.passed {
                println!("{}: all checks passed", report.name);
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("{}: one or more checks failed", report.name);
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn generate(what: GenerateCmd, out: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(out)?;
    match what {
        GenerateCmd::SpikeSine { n, sample_rate, spike_index, tone_freq } => {
            let sig = spike_plus_sine(n, sample_rate, spike_index, tone_freq)?;
            write_signal(&out.join("y.csv"), &sig.mixture, Some("spike + sine mixture"))?;
            write_signal(&out.join("spike_truth.csv"), &sig.spike, Some("spike truth"))?;
            write_signal(&out.join("sine_truth.csv"), &sig.sine, Some("sine truth"))?;
        }
        GenerateCmd::Oscillator { tau, f0, f, forcing, sample_rate, n } => {
            let spec = OscillatorSpec { tau, f0, f, forcing_amplitude: forcing, sample_rate, n };
            let osc = driven_oscillator(&spec)?;
            write_json(&out.join("spec.json"), &spec)?;
            write_signal(&out.join("y.csv"), &osc.total, Some("zero-state response"))?;
            write_signal(&out.join("homogeneous_truth.csv"), &osc.homogeneous, Some("transient truth"))?;
            write_signal(&out.join("particular_truth.csv"), &osc.particular, Some("steady-state truth"))?;
        }
        GenerateCmd::Target { spec, processed } => {
            let spec: SyntheticTargetSpec = match spec {
                Some(path) => read_json_file(&path)?,
                None => SyntheticTargetSpec::desk_default(),
            };
            let target = synthetic_elastic_target(&spec)?;
            write_json(&out.join("spec.json"), &spec)?;
            write_signal(&out.join("y.csv"), &target.total, Some("synthetic elastic target"))?;
            write_signal(&out.join("short_truth.csv"), &target.short_truth, Some("short-duration truth"))?;
            write_signal(&out.join("long_truth.csv"), &target.long_truth, Some("long-duration truth"))?;
            if processed {
                let recipe = TargetRecipe { target: spec, ..TargetRecipe::desk_default() };
                let p = recipe.clean()?;
                write_signal(&out.join("processed_clean.csv"), &p.clean, Some("matched-filtered clean"))?;
                write_signal(
                    &out.join("processed_short_truth.csv"),
                    &p.short_component,
                    Some("matched-filtered short truth"),
                )?;
                write_signal(
                    &out.join("processed_long_truth.csv"),
                    &p.long_component,
                    Some("matched-filtered long truth"),
                )?;
                write_json(&out.join("recipe.json"), &recipe)?;
            }
        }
        GenerateCmd::Chirp { f_start, f_end, duration, sample_rate } => {
            let chirp = lfm_chirp(f_start, f_end, duration, sample_rate)?;
            write_signal(&out.join("chirp.csv"), &chirp, Some("lfm chirp"))?;
        }
        GenerateCmd::Scan { spec } => {
            let spec: ScanSpec = match spec {
                Some(path) => read_json_file(&path)?,
                None => ScanSpec::desk_default(),
            };
            let scan = morphsep_core::imaging::synthesize_scan(&spec)?;
            export_scan(&scan, out)?;
            write_json(&out.join("spec.json"), &spec)?;
        }
    }
    println!("generate -> {}", out.display());
    Ok(())
}

fn build_config(args: &SeparateArgs, lambda_max_value: f64) -> anyhow::Result<SolverConfig> {
    let mode = match args.mode {
        ModeArg::Bp => SolverMode::BasisPursuit,
        ModeArg::Bpd => SolverMode::BasisPursuitDenoising,
    };
    let common = args.lambda_frac * lambda_max_value;
    let lambda1 = args.lambda1.unwrap_or(common);
    let lambda2 = args.lambda2.unwrap_or(common);
    if !(lambda1 > 0.0 && lambda2 > 0.0) {
        bail!("lambdas must be positive; is the input signal identically zero?");
    }
    Ok(SolverConfig {
        mode,
        lambda1,
        lambda2,
        mu: args.mu,
        max_iters: args.iters,
        residual_tol: None,
        report_sparse_iterate: true,
    })
}

fn build_frames(
    args: &SeparateArgs,
    n: usize,
    sample_rate: f64,
) -> anyhow::Result<(Box<dyn morphsep_core::Frame>, Box<dyn morphsep_core::Frame>)> {
    if let Some(path) = &args.envelopes {
        let pair: EnvelopePairSpec = read_json_file(path)?;
        return Ok(pair.build_frames()?);
    }
    let method = match args.method {
        MethodArg::Fft => MethodSpec::Fft,
        MethodArg::Esp => MethodSpec::reference_esp(),
    };
    Ok(method.build_frames(n, sample_rate)?)
}

fn parse_interval(values: &Option<Vec<f64>>) -> anyhow::Result<Option<TimeInterval>> {
    match values {
        None => Ok(None),
        Some(v) => {
            let [start, end] = v.as_slice() else {
                bail!("interval needs exactly two values");
            };
            Ok(Some(TimeInterval::new(*start, *end)?))
        }
    }
}

fn separate(args: SeparateArgs, out: &Path) -> anyhow::Result<()> {
    if args.input.is_dir() {
        separate_scan_dir(args, out)
    } else {
        separate_signal(args, out)
    }
}

fn separate_signal(args: SeparateArgs, out: &Path) -> anyhow::Result<()> {
    let signal = match args.sample_rate {
        Some(fs) => read_signal_csv(&args.input, fs)?,
        None => read_signal(&args.input)
            .map_err(|e| anyhow!("{e}; pass --sample-rate for a headerless CSV"))?,
    };
    let (a1, a2) = build_frames(&args, signal.len(), signal.sample_rate())?;
    let lm = lambda_max(&signal, a1.as_ref(), a2.as_ref())?;
    let cfg = build_config(&args, lm)?;
    let result = solve_mca(&signal, a1.as_ref(), a2.as_ref(), &cfg)?;

    let metrics = match (parse_interval(&args.interval1)?, parse_interval(&args.interval2)?) {
        (Some(i1), Some(i2)) => Some(interval_errors(&signal, &result.y1, &result.y2, i1, i2, None)?),
        (None, None) => None,
        _ => bail!("provide both --interval1 and --interval2 or neither"),
    };
    output::write_separation(out, &signal, &result, &cfg, metrics.as_ref())?;
    println!(
        "separate: {} iterations, relative residual {:.3e} -> {}",
        result.iterations_run,
        result.relative_residual(&signal),
        out.display()
    );
    Ok(())
}

#[derive(serde::Serialize)]
struct ScanSummary {
    mean_m1: f64,
    std_m1: f64,
    mean_m2: f64,
    std_m2: f64,
    angles: usize,
    failed_angles: usize,
}

fn separate_scan_dir(args: SeparateArgs, out: &Path) -> anyhow::Result<()> {
    let scan = ingest_scan(&args.input)?;
    let n = scan.samples_per_angle();
    let (a1, a2) = build_frames(&args, n, scan.sample_rate())?;
    let lm = lambda_max(&scan.series()[0], a1.as_ref(), a2.as_ref())?;
    let cfg = build_config(&args, lm)?;
    let (default_i1, default_i2) = TimeInterval::imaging_defaults();
    let i1 = parse_interval(&args.interval1)?.unwrap_or(default_i1);
    let i2 = parse_interval(&args.interval2)?.unwrap_or(default_i2);

    let sep = separate_scan(&scan, a1.as_ref(), a2.as_ref(), &cfg, i1, i2)?;
    std::fs::create_dir_all(out)?;
    export_scan(&sep.short_scan, &out.join("short"))?;
    export_scan(&sep.long_scan, &out.join("long"))?;
    write_json(&out.join("per_angle.json"), &sep.per_angle)?;
    write_json(
        &out.join("summary.json"),
        &ScanSummary {
            mean_m1: sep.mean_m1,
            std_m1: sep.std_m1,
            mean_m2: sep.mean_m2,
            std_m2: sep.std_m2,
            angles: sep.per_angle.len(),
            failed_angles: sep.per_angle.iter().filter(|a| a.error.is_some()).count(),
        },
    )?;
    println!(
        "separate scan: {} angles, mean m1 {:.4}, mean m2 {:.4} -> {}",
        sep.per_angle.len(),
        sep.mean_m1,
        sep.mean_m2,
        out.display()
    );
    Ok(())
}
