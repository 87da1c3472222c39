use std::time::Instant;

use cascade_kde::corruption::{corrupt, CorruptionKind, CorruptionSpec, SignalKind, SyntheticSignalSpec};
use cascade_kde::{generate_clean, restore, MetricsReport, RestorationConfig, TimeSeries};
use rayon::prelude::*;

use crate::error::{BenchError, BenchResult};
use crate::plan::{BenchmarkPlan, CorruptionEntry, DatasetSpec, Method, MethodSpec};

/// One (dataset, corruption, method, seed) measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub dataset: String,
    pub noise: String,
    pub method: String,
    pub seed: u64,
    pub metrics: MetricsReport,
    /// Time spent inside the restoration call only.
    pub wall_time_ms: f64,
}

/// A tuple that could not be evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct RunFailure {
    pub dataset: String,
    pub noise: String,
    pub method: String,
    pub seed: u64,
    pub message: String,
}

/// Mean and population standard deviation of one column.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    /// Non-finite entries (unmatched peak errors) are skipped; an all-NaN
    /// column yields NaN.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
        if v.is_empty() {
            return Stat { mean: f64::NAN, std: f64::NAN };
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        Stat { mean, std: var.sqrt() }
    }
}

/// Column names of the per-metric statistics, in output order.
pub const METRIC_COLUMNS: [&str; 10] = [
    "rmse",
    "mae",
    "snr_db",
    "feature_snr_db",
    "derivative_rmse",
    "derivative_snr_db",
    "peak_f1",
    "peak_amp_err",
    "peak_loc_err",
    "wall_time_ms",
];

impl ResultRow {
    /// Values in [`METRIC_COLUMNS`] order.
    pub fn metric_values(&self) -> [f64; 10] {
        let m = &self.metrics;
        [
            m.rmse,
            m.mae,
            m.snr_db,
            m.feature_snr_db,
            m.derivative_rmse,
            m.derivative_snr_db,
            m.peak_f1,
            m.peak_amplitude_error,
            m.peak_location_error,
            self.wall_time_ms,
        ]
    }
}

fn column_stats(rows: &[&ResultRow]) -> Vec<Stat> {
    (0..METRIC_COLUMNS.len())
        .map(|c| Stat::of(rows.iter().map(|r| r.metric_values()[c])))
        .collect()
}

/// Statistics across seeds for one (dataset, corruption, method).
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub dataset: String,
    pub noise: String,
    pub method: String,
    pub count: usize,
    /// In [`METRIC_COLUMNS`] order.
    pub stats: Vec<Stat>,
}

impl AggregateRow {
    pub fn stat(&self, column: &str) -> Option<Stat> {
        METRIC_COLUMNS.iter().position(|c| *c == column).map(|i| self.stats[i])
    }
}

/// Statistics across every dataset, corruption and seed for one method.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodSummary {
    pub method: String,
    pub label: String,
    pub count: usize,
    pub stats: Vec<Stat>,
}

impl MethodSummary {
    pub fn stat(&self, column: &str) -> Option<Stat> {
        METRIC_COLUMNS.iter().position(|c| *c == column).map(|i| self.stats[i])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanOutcome {
    /// Successful rows in plan order.
    pub rows: Vec<ResultRow>,
    pub failures: Vec<RunFailure>,
    pub aggregates: Vec<AggregateRow>,
    pub summary: Vec<MethodSummary>,
}

/// Groups rows by (dataset, corruption, method) in first-seen order.
pub fn aggregate(rows: &[ResultRow]) -> Vec<AggregateRow> {
    let mut keys: Vec<(&str, &str, &str)> = Vec::new();
    for r in rows {
        let key = (r.dataset.as_str(), r.noise.as_str(), r.method.as_str());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(d, n, m)| {
            let group: Vec<&ResultRow> = rows
                .iter()
                .filter(|r| r.dataset == d && r.noise == n && r.method == m)
                .collect();
            AggregateRow {
                dataset: d.to_string(),
                noise: n.to_string(),
                method: m.to_string(),
                count: group.len(),
                stats: column_stats(&group),
            }
        })
        .collect()
}

/// One row per plan method, pooling all of its result rows.
pub fn summarize(rows: &[ResultRow], methods: &[MethodSpec]) -> Vec<MethodSummary> {
    methods
        .iter()
        .map(|m| {
            let group: Vec<&ResultRow> = rows.iter().filter(|r| r.method == m.id).collect();
            MethodSummary {
                method: m.id.clone(),
                label: m.label.clone(),
                count: group.len(),
                stats: column_stats(&group),
            }
        })
        .collect()
}

struct Task<'a> {
    dataset: &'a DatasetSpec,
    clean: &'a BenchResult<TimeSeries>,
    corruption: &'a CorruptionEntry,
    method: &'a MethodSpec,
    seed: u64,
}

fn run_task(task: &Task, plan: &BenchmarkPlan) -> Result<ResultRow, RunFailure> {
    let fail = |message: String| RunFailure {
        dataset: task.dataset.id.clone(),
        noise: task.corruption.id.clone(),
        method: task.method.id.clone(),
        seed: task.seed,
        message,
    };
    let clean = task.clean.as_ref().map_err(|e| fail(e.to_string()))?;
    let spec = task.corruption.spec.clone().with_seed(task.seed);
    let (noisy, _) = corrupt(clean, &spec).map_err(|e| fail(e.to_string()))?;
    let method = per_seed_method(&task.method.method, task.seed);
    let start = Instant::now();
    let restored = method.run(&noisy);
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let restored = restored.map_err(|e| fail(e.to_string()))?;
    let metrics = MetricsReport::compute(clean, &restored, plan.prominence, plan.peak_tolerance)
        .map_err(|e| fail(e.to_string()))?;
    Ok(ResultRow {
        dataset: task.dataset.id.clone(),
        noise: task.corruption.id.clone(),
        method: task.method.id.clone(),
        seed: task.seed,
        metrics,
        wall_time_ms,
    })
}

/// Offsets a random-depth seed by the run seed so each run draws its own
/// depth while staying reproducible.
pub fn per_seed_method(method: &Method, seed: u64) -> Method {
    match method {
        Method::Cascade(config) if config.variants.random_k.is_some() => {
            let mut config = config.clone();
            config.variants.random_k = config.variants.random_k.map(|s| s.wrapping_add(seed));
            Method::Cascade(config)
        }
        other => other.clone(),
    }
}

/// Runs every tuple of a plan. Per-tuple data errors are collected and the
/// run continues; an invalid plan is rejected before any work.
pub fn run_plan(plan: &BenchmarkPlan) -> BenchResult<PlanOutcome> {
    plan.validate()?;
    let cleans: Vec<BenchResult<TimeSeries>> = plan.datasets.iter().map(DatasetSpec::load).collect();
    let mut tasks = Vec::with_capacity(plan.cardinality());
    for (dataset, clean) in plan.datasets.iter().zip(&cleans) {
        for corruption in &plan.corruptions {
            for method in &plan.methods {
                for &seed in &plan.seeds {
                    tasks.push(Task { dataset, clean, corruption, method, seed });
                }
            }
        }
    }

    let results: Vec<Result<ResultRow, RunFailure>> = if plan.jobs == 1 {
        tasks.iter().map(|t| run_task(t, plan)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(plan.jobs)
            .build()
            .map_err(|e| BenchError::usage(format!("cannot start worker pool: {e}")))?;
        pool.install(|| tasks.par_iter().map(|t| run_task(t, plan)).collect())
    };

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(f) => failures.push(f),
        }
    }
    let aggregates = aggregate(&rows);
    let summary = summarize(&rows, &plan.methods);
    Ok(PlanOutcome { rows, failures, aggregates, summary })
}

/// Timing of a full restoration at one length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingRow {
    pub length: usize,
    /// Median over the repetitions.
    pub wall_time_ms: f64,
}

pub const SWEEP_NOISE_SIGMA: f64 = 0.1;
pub const SWEEP_SEED: u64 = 1;

/// Noisy sine used by [`runtime_sweep`].
pub fn sweep_input(length: usize) -> BenchResult<TimeSeries> {
    let clean = generate_clean(&SyntheticSignalSpec::new(SignalKind::Sine { frequency: 2.0 }, length))?;
    let spec = CorruptionSpec {
        sigma: SWEEP_NOISE_SIGMA,
        seed: SWEEP_SEED,
        ..CorruptionSpec::new(CorruptionKind::Gaussian)
    };
    Ok(corrupt(&clean, &spec)?.0)
}

/// Median wall time of `repetitions` full restorations per length.
pub fn runtime_sweep(
    lengths: &[usize],
    config: &RestorationConfig,
    repetitions: usize,
) -> BenchResult<Vec<ScalingRow>> {
    if lengths.windows(2).any(|w| w[0] > w[1]) {
        return Err(BenchError::usage("lengths must be sorted ascending"));
    }
    if repetitions == 0 {
        return Err(BenchError::usage("repetitions must be at least 1"));
    }
    config.validate()?;
    lengths
        .iter()
        .map(|&length| {
            let input = sweep_input(length)?;
            let mut times = Vec::with_capacity(repetitions);
            for _ in 0..repetitions {
                let start = Instant::now();
                restore(&input, config)?;
                times.push(start.elapsed().as_secs_f64() * 1e3);
            }
            times.sort_by(f64::total_cmp);
            let mid = times.len() / 2;
            let wall_time_ms = if times.len() % 2 == 1 {
                times[mid]
            } else {
                0.5 * (times[mid - 1] + times[mid])
            };
            Ok(ScalingRow { length, wall_time_ms })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_std() {
        let s = Stat::of([1.0, 3.0]);
        assert_eq!((s.mean, s.std), (2.0, 1.0));
        let s = Stat::of([f64::NAN, 4.0]);
        assert_eq!((s.mean, s.std), (4.0, 0.0));
        assert!(Stat::of([f64::NAN]).mean.is_nan());
    }

    #[test]
    fn sweep_rejects_unsorted() {
        let err = runtime_sweep(&[200, 100], &RestorationConfig::default(), 1).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
