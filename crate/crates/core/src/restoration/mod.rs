//! Density-truncated cascade restoration with score-guided depth selection.

mod config;
mod support;
mod trace;

pub use config::{Depth, RestorationConfig, Variants};
pub use support::{
    degenerate_halfwidth, local_support, local_window, support_from_window, truncated_expectation, Interval,
    MIN_WINDOW, UNDERFLOW_FLOOR,
};
pub use trace::{CascadeTrace, ParetoScore, StageRecord, StopReason};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baselines::nw_regression;
use crate::density::{Bandwidths, DensityField};
use crate::error::{Error, Result};
use crate::series::{finite_diff, normalize, reflect_pad, TimeSeries};
use crate::stats::median;

/// Shortest series [`restore`] and [`pareto_score`] accept.
pub const MIN_RESTORE_LEN: usize = 5;

/// Amplitude interval integrated over at `t_j` for the configured variant.
pub fn stage_support(input: &TimeSeries, t_j: f64, bandwidths: Bandwidths, config: &RestorationConfig) -> Interval {
    if config.variants.fixed_grid {
        let (lo, hi) = config.fixed_grid_bounds;
        return Interval::new(lo, hi);
    }
    if config.variants.no_truncation {
        return Interval::UNIT;
    }
    local_support(
        input,
        t_j,
        config.r_t_factor * bandwidths.h_t,
        config.iqr_multiplier,
        degenerate_halfwidth(bandwidths.h_y),
    )
}

/// One application of the restoration operator at stage `k` (1-based).
///
/// `input` is in normalized units. Padded samples act as density sources
/// only; the output has the input's timestamps.
pub fn cascade_stage(input: &TimeSeries, k: usize, config: &RestorationConfig) -> Result<TimeSeries> {
    let bandwidths = config.stage_bandwidths(k, input)?;
    cascade_stage_with(input, bandwidths, config)
}

fn cascade_stage_with(input: &TimeSeries, bandwidths: Bandwidths, config: &RestorationConfig) -> Result<TimeSeries> {
    let pad = config.padding(input.len());
    let padded = if pad > 0 {
        reflect_pad(input, pad)?
    } else {
        input.clone()
    };

    if config.variants.one_dimensional {
        let values = nw_regression(&padded, bandwidths.h_t, input.times())?;
        return input.with_values(values);
    }

    let field = DensityField::from_series(&padded, bandwidths);
    let m = config.grid_nodes(input.len());
    let r_t = config.r_t_factor * bandwidths.h_t;
    let point = |&t_j: &f64| {
        let omega = stage_support(input, t_j, bandwidths, config);
        truncated_expectation(&field, t_j, omega, m)
            .unwrap_or_else(|| omega.clamp(median(&local_window(input, t_j, r_t))))
    };
    let values: Vec<f64> = if config.parallel {
        input.times().par_iter().map(point).collect()
    } else {
        input.times().iter().map(point).collect()
    };
    input.with_values(values)
}

/// Sharpness `F = max |d2|`, smoothness `H = std(d2)` and `F - lambda H` over
/// the interior second differences (indices `2..=n-3`).
pub fn pareto_score(series: &TimeSeries, lambda: f64) -> Result<ParetoScore> {
    let n = series.len();
    if n < MIN_RESTORE_LEN {
        return Err(Error::invalid(format!(
            "score needs at least {MIN_RESTORE_LEN} samples, got {n}"
        )));
    }
    let d2 = finite_diff(series.values(), series.times(), 2)?;
    let interior = &d2[2..n - 2];
    let sharpness = interior.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let len = interior.len() as f64;
    let mean = interior.iter().sum::<f64>() / len;
    let smoothness = (interior.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / len).sqrt();
    Ok(ParetoScore {
        sharpness,
        smoothness,
        score: sharpness - lambda * smoothness,
    })
}

/// Restores `series` and reports every executed stage.
///
/// The series is normalized once, passed through the cascade, and the
/// selected stage output is mapped back to the original units and times.
pub fn restore(series: &TimeSeries, config: &RestorationConfig) -> Result<(TimeSeries, CascadeTrace)> {
    config.validate()?;
    if series.len() < MIN_RESTORE_LEN {
        return Err(Error::invalid(format!(
            "restoration needs at least {MIN_RESTORE_LEN} samples, got {}",
            series.len()
        )));
    }
    let (normalized, params) = normalize(series)?;

    let depth = match config.depth() {
        Depth::Adaptive => None,
        Depth::Fixed(k) => Some(k),
        Depth::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed).random_range(1..=config.k_max)),
    };
    let last_stage = depth.unwrap_or(config.k_max);

    let mut stages = Vec::with_capacity(last_stage);
    let mut current = normalized;
    let mut best: Option<(f64, usize, TimeSeries)> = None;
    let mut stale = 0;
    let mut stop = if depth.is_some() { StopReason::FixedDepth } else { StopReason::KMax };

    for k in 1..=last_stage {
        let bandwidths = config.stage_bandwidths(k, &current)?;
        current = cascade_stage_with(&current, bandwidths, config)?;
        let pareto = pareto_score(&current, config.lambda)?;
        stages.push(StageRecord { k, bandwidths, pareto });
        if depth.is_some() {
            continue;
        }
        if best.as_ref().is_none_or(|(s, _, _)| pareto.score > *s) {
            best = Some((pareto.score, k, current.clone()));
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.stop_patience && k < last_stage {
                stop = StopReason::Patience;
                break;
            }
        }
    }

    let (selected, output) = match best {
        Some((_, k, s)) => (k, s),
        None => (last_stage, current),
    };
    let (_, values) = output.into_parts();
    let restored = series.with_values(params.denormalize_values(&values))?;
    Ok((restored, CascadeTrace { stages, selected, stop }))
}
