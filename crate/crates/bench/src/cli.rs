//! `ckde` subcommands.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cascade_kde::corruption::{corrupt, CorruptionKind, CorruptionSpec, SignalKind, SyntheticSignalSpec};
use cascade_kde::io::{read_series_file, write_series};
use cascade_kde::metrics::{DEFAULT_PEAK_TOLERANCE, DEFAULT_PROMINENCE};
use cascade_kde::{apply_baseline, generate_clean, restore, BaselineKind, BaselineSpec, MetricsReport, RestorationConfig};
use clap::{Args, Parser, Subcommand};

use crate::config::{apply_baseline_key, apply_restoration_key, entry_from_arg, parse_flat, Entry};
use crate::error::{BenchError, BenchResult};
use crate::plan::BenchmarkPlan;
use crate::report::{write_aggregates, write_results, write_scaling, write_summary};
use crate::run::{run_plan, runtime_sweep};

#[derive(Debug, Parser)]
#[command(name = "ckde", version, about = "Training-free time-series restoration and benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a clean synthetic series as CSV.
    Generate(GenerateArgs),
    /// Corrupt a series and write it with a mask column.
    Corrupt(CorruptArgs),
    /// Restore a series with the cascade or a baseline.
    Restore(RestoreArgs),
    /// Compare an estimate against ground truth.
    Metrics(MetricsArgs),
    /// Run a benchmark plan.
    Bench(BenchArgs),
    /// Time full restorations over increasing lengths.
    Scaling(ScalingArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// sine, multi_peak, damped_oscillation or degradation_curve
    #[arg(long)]
    signal: String,
    #[arg(long, default_value_t = 500)]
    length: usize,
    #[arg(long)]
    frequency: Option<f64>,
    #[arg(long)]
    peaks: Option<usize>,
    #[arg(long)]
    decay: Option<f64>,
    #[arg(long)]
    knee: Option<f64>,
    /// Output path, `-` for stdout.
    #[arg(long, default_value = "-")]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct CorruptArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "-")]
    output: PathBuf,
    #[arg(long, default_value = "mixed")]
    kind: String,
    #[arg(long, default_value_t = 0.10)]
    sigma: f64,
    #[arg(long, default_value_t = 0.10)]
    ratio: f64,
    #[arg(long, default_value_t = 0.50)]
    amplitude: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Leave impulse values unclipped.
    #[arg(long)]
    no_clip: bool,
}

#[derive(Debug, Args)]
struct MethodArgs {
    /// `cascade` or a baseline name.
    #[arg(long, default_value = "cascade")]
    method: String,
    /// Flat `key = value` file of method settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Setting override, repeatable: `--set k_max=3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Args)]
struct RestoreArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "-")]
    output: PathBuf,
    #[command(flatten)]
    method: MethodArgs,
    /// Write the per-stage trace here (`-` for stdout). Cascade only.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    estimate: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PROMINENCE)]
    prominence: f64,
    #[arg(long, default_value_t = DEFAULT_PEAK_TOLERANCE)]
    tolerance: usize,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    plan: PathBuf,
    /// Result CSV; defaults to the plan's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per (dataset, corruption, method) mean and std.
    #[arg(long)]
    aggregate: Option<PathBuf>,
    /// Per-method mean and std over everything.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Worker threads; overrides the plan, 0 uses every core.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct ScalingArgs {
    /// Comma-separated ascending lengths.
    #[arg(long, value_delimiter = ',', default_value = "100,250,500,1000,2000,4000")]
    lengths: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    repetitions: usize,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Corrupt(a) => corrupt_cmd(a),
        Command::Restore(a) => restore_cmd(a),
        Command::Metrics(a) => metrics_cmd(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Scaling(a) => scaling_cmd(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ckde: {e}");
            e.exit_code()
        }
    }
}

fn open_output(path: &Path) -> BenchResult<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        let f = File::create(path).map_err(|e| BenchError::data(format!("{}: {e}", path.display())))?;
        Ok(Box::new(BufWriter::new(f)))
    }
}

fn read_input(path: &Path) -> BenchResult<cascade_kde::TimeSeries> {
    read_series_file(path).map_err(|e| BenchError::data(format!("{}: {e}", path.display())))
}

fn generate(a: GenerateArgs) -> BenchResult<()> {
    let mut kind = SignalKind::from_name(&a.signal).map_err(|e| BenchError::usage(e.to_string()))?;
    match &mut kind {
        SignalKind::Sine { frequency } => {
            if let Some(f) = a.frequency {
                *frequency = f;
            }
        }
        SignalKind::MultiPeak { peaks } => {
            if let Some(p) = a.peaks {
                *peaks = p;
            }
        }
        SignalKind::DampedOscillation { frequency, decay } => {
            if let Some(f) = a.frequency {
                *frequency = f;
            }
            if let Some(d) = a.decay {
                *decay = d;
            }
        }
        SignalKind::DegradationCurve { knee } => {
            if let Some(k) = a.knee {
                *knee = k;
            }
        }
    }
    let spec = SyntheticSignalSpec::new(kind, a.length);
    spec.validate().map_err(|e| BenchError::usage(e.to_string()))?;
    let series = generate_clean(&spec)?;
    write_series(open_output(&a.output)?, &series, None)?;
    Ok(())
}

fn corrupt_cmd(a: CorruptArgs) -> BenchResult<()> {
    let spec = CorruptionSpec {
        kind: CorruptionKind::from_str(&a.kind).map_err(|e| BenchError::usage(e.to_string()))?,
        sigma: a.sigma,
        ratio: a.ratio,
        amplitude: a.amplitude,
        seed: a.seed,
        clip_impulses: !a.no_clip,
    };
    spec.validate().map_err(|e| BenchError::usage(e.to_string()))?;
    let series = read_input(&a.input)?;
    let (noisy, mask) = corrupt(&series, &spec)?;
    write_series(open_output(&a.output)?, &noisy, Some(&mask))?;
    Ok(())
}

fn method_entries(config: &Option<PathBuf>, overrides: &[String]) -> BenchResult<Vec<Entry>> {
    let mut entries = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| BenchError::data(format!("{}: {e}", path.display())))?;
            parse_flat(&text)?
        }
        None => Vec::new(),
    };
    for o in overrides {
        entries.push(entry_from_arg(o)?);
    }
    Ok(entries)
}

fn cascade_config(entries: &[Entry]) -> BenchResult<RestorationConfig> {
    let mut config = RestorationConfig::default();
    for e in entries {
        if !apply_restoration_key(&mut config, e)? {
            return Err(BenchError::usage(format!("unknown cascade setting `{}`", e.key)));
        }
    }
    config.validate()?;
    Ok(config)
}

fn restore_cmd(a: RestoreArgs) -> BenchResult<()> {
    let entries = method_entries(&a.method.config, &a.method.overrides)?;
    let restored = if a.method.method == "cascade" {
        let config = cascade_config(&entries)?;
        let (restored, trace) = restore(&read_input(&a.input)?, &config)?;
        if let Some(path) = &a.trace {
            let mut w = open_output(path)?;
            w.write_all(trace.to_text().as_bytes())?;
            w.flush()?;
        }
        restored
    } else {
        if a.trace.is_some() {
            return Err(BenchError::usage("--trace is only available for the cascade method"));
        }
        let kind = BaselineKind::from_str(&a.method.method)
            .map_err(|_| BenchError::usage(format!("unknown method `{}`", a.method.method)))?;
        let mut spec = BaselineSpec::new(kind);
        for e in &entries {
            if e.key == "baseline" || !apply_baseline_key(&mut spec, e)? {
                return Err(BenchError::usage(format!("unknown baseline setting `{}`", e.key)));
            }
        }
        spec.validate()?;
        apply_baseline(&read_input(&a.input)?, &spec)?
    };
    let mut out = open_output(&a.output)?;
    write_series(&mut out, &restored, None)?;
    out.flush()?;
    Ok(())
}

fn metrics_cmd(a: MetricsArgs) -> BenchResult<()> {
    if !(a.prominence.is_finite() && a.prominence >= 0.0) {
        return Err(BenchError::usage("--prominence must be finite and non-negative"));
    }
    let truth = read_input(&a.truth)?;
    let estimate = read_input(&a.estimate)?;
    if truth.times() != estimate.times() {
        return Err(BenchError::data("truth and estimate timestamps differ"));
    }
    let m = MetricsReport::compute(&truth, &estimate, a.prominence, a.tolerance)?;
    let lines = [
        ("rmse", m.rmse),
        ("mae", m.mae),
        ("snr_db", m.snr_db),
        ("feature_snr_db", m.feature_snr_db),
        ("derivative_rmse", m.derivative_rmse),
        ("derivative_snr_db", m.derivative_snr_db),
        ("peak_f1", m.peak_f1),
        ("peak_amp_err", m.peak_amplitude_error),
        ("peak_loc_err", m.peak_location_error),
    ];
    let mut out = io::stdout().lock();
    for (k, v) in lines {
        writeln!(out, "{k}={v}")?;
    }
    Ok(())
}

fn bench_cmd(a: BenchArgs) -> BenchResult<()> {
    let mut plan = BenchmarkPlan::from_file(&a.plan)?;
    if let Some(j) = a.jobs {
        plan.jobs = j;
    }
    let out = a
        .out
        .or_else(|| plan.output.clone())
        .ok_or_else(|| BenchError::usage("no result path: pass --out or set `output` in [plan]"))?;
    let outcome = run_plan(&plan)?;
    write_results(open_output(&out)?, &outcome.rows)?;
    if let Some(path) = &a.aggregate {
        write_aggregates(open_output(path)?, &outcome.aggregates)?;
    }
    if let Some(path) = &a.summary {
        write_summary(open_output(path)?, &outcome.summary)?;
    }
    for f in &outcome.failures {
        eprintln!(
            "ckde: {}/{}/{} seed {}: {}",
            f.dataset, f.noise, f.method, f.seed, f.message
        );
    }
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        Err(BenchError::data(format!(
            "{} of {} runs failed",
            outcome.failures.len(),
            plan.cardinality()
        )))
    }
}

fn scaling_cmd(a: ScalingArgs) -> BenchResult<()> {
    let config = cascade_config(&method_entries(&a.config, &a.overrides)?)?;
    let rows = runtime_sweep(&a.lengths, &config, a.repetitions)?;
    write_scaling(open_output(&a.out)?, &rows)
}
