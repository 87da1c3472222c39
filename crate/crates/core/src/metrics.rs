//! Reconstruction, derivative-fidelity and peak-preservation metrics.

use crate::error::{Error, Result};
use crate::series::{finite_diff, TimeSeries};

/// SNR values are reported inside `[-SNR_CAP_DB, SNR_CAP_DB]`; a zero error
/// sum maps to the upper cap.
pub const SNR_CAP_DB: f64 = 300.0;

pub const DEFAULT_PROMINENCE: f64 = 0.05;
pub const DEFAULT_PEAK_TOLERANCE: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointwiseMetrics {
    pub rmse: f64,
    pub mae: f64,
    pub snr_db: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeMetrics {
    pub derivative_rmse: f64,
    pub derivative_snr_db: f64,
    /// Same quantity as `derivative_snr_db`: signal power of the true first
    /// derivative over the power of the derivative error.
    pub feature_snr_db: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PeakSet {
    pub indices: Vec<usize>,
    pub amplitudes: Vec<f64>,
    pub prominences: Vec<f64>,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Peak matching outcome. Errors are `NaN` when nothing matched.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakMetrics {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub f1: f64,
    pub amplitude_error: f64,
    pub location_error: f64,
}

/// Full metric row for one restored series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsReport {
    pub rmse: f64,
    pub mae: f64,
    pub snr_db: f64,
    pub feature_snr_db: f64,
    pub derivative_rmse: f64,
    pub derivative_snr_db: f64,
    pub peak_f1: f64,
    pub peak_amplitude_error: f64,
    pub peak_location_error: f64,
}

impl MetricsReport {
    /// Compares `estimate` with `truth`; both must share timestamps.
    pub fn compute(
        truth: &TimeSeries,
        estimate: &TimeSeries,
        prominence: f64,
        tolerance: usize,
    ) -> Result<Self> {
        if truth.len() != estimate.len() {
            return Err(Error::invalid("truth and estimate differ in length"));
        }
        let p = pointwise_metrics(truth.values(), estimate.values())?;
        let d = derivative_metrics(truth.values(), estimate.values(), truth.times())?;
        let pk = peak_metrics(
            &detect_peaks(truth.values(), prominence),
            &detect_peaks(estimate.values(), prominence),
            tolerance,
        );
        Ok(Self {
            rmse: p.rmse,
            mae: p.mae,
            snr_db: p.snr_db,
            feature_snr_db: d.feature_snr_db,
            derivative_rmse: d.derivative_rmse,
            derivative_snr_db: d.derivative_snr_db,
            peak_f1: pk.f1,
            peak_amplitude_error: pk.amplitude_error,
            peak_location_error: pk.location_error,
        })
    }
}

pub fn pointwise_metrics(truth: &[f64], estimate: &[f64]) -> Result<PointwiseMetrics> {
    if truth.len() != estimate.len() {
        return Err(Error::invalid(format!(
            "length mismatch: truth {} vs estimate {}",
            truth.len(),
            estimate.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::invalid("metrics need at least one sample"));
    }
    let n = truth.len() as f64;
    let mut sq = 0.0;
    let mut abs = 0.0;
    let mut power = 0.0;
    for (&a, &b) in truth.iter().zip(estimate) {
        let e = b - a;
        sq += e * e;
        abs += e.abs();
        power += a * a;
    }
    Ok(PointwiseMetrics {
        rmse: (sq / n).sqrt(),
        mae: abs / n,
        snr_db: snr_db(power, sq),
    })
}

fn snr_db(signal_power: f64, error_power: f64) -> f64 {
    if error_power == 0.0 {
        return SNR_CAP_DB;
    }
    (10.0 * (signal_power / error_power).log10()).clamp(-SNR_CAP_DB, SNR_CAP_DB)
}

/// Metrics on first derivatives computed with [`finite_diff`].
pub fn derivative_metrics(truth: &[f64], estimate: &[f64], times: &[f64]) -> Result<DerivativeMetrics> {
    if truth.len() != estimate.len() {
        return Err(Error::invalid("truth and estimate differ in length"));
    }
    let dt = finite_diff(truth, times, 1)?;
    let de = finite_diff(estimate, times, 1)?;
    let p = pointwise_metrics(&dt, &de)?;
    Ok(DerivativeMetrics {
        derivative_rmse: p.rmse,
        derivative_snr_db: p.snr_db,
        feature_snr_db: p.snr_db,
    })
}

/// Local maxima (`y[i] > y[i-1] && y[i] >= y[i+1]`) whose topographic
/// prominence reaches `prominence`.
///
/// Prominence follows the lowest-contour rule: walk each side until a
/// strictly higher sample or the series end, take the minimum on each side,
/// and subtract the higher of the two minima from the peak height.
pub fn detect_peaks(values: &[f64], prominence: f64) -> PeakSet {
    let mut peaks = PeakSet::default();
    let n = values.len();
    if n < 3 {
        return peaks;
    }
    for i in 1..n - 1 {
        let y = values[i];
        if !(y > values[i - 1] && y >= values[i + 1]) {
            continue;
        }
        let mut left_min = y;
        for &v in values[..i].iter().rev() {
            if v > y {
                break;
            }
            left_min = left_min.min(v);
        }
        let mut right_min = y;
        for &v in &values[i + 1..] {
            if v > y {
                break;
            }
            right_min = right_min.min(v);
        }
        let prom = y - left_min.max(right_min);
        if prom >= prominence {
            peaks.indices.push(i);
            peaks.amplitudes.push(y);
            peaks.prominences.push(prom);
        }
    }
    peaks
}

/// Greedy nearest-first one-to-one matching within `tolerance` samples.
pub fn peak_metrics(truth: &PeakSet, estimate: &PeakSet, tolerance: usize) -> PeakMetrics {
    let mut pairs = Vec::new();
    for (a, &ti) in truth.indices.iter().enumerate() {
        for (b, &ei) in estimate.indices.iter().enumerate() {
            let dist = ti.abs_diff(ei);
            if dist <= tolerance {
                pairs.push((dist, a, b));
            }
        }
    }
    pairs.sort_unstable();

    let mut truth_used = vec![false; truth.len()];
    let mut est_used = vec![false; estimate.len()];
    let mut tp = 0usize;
    let mut amp_sum = 0.0;
    let mut loc_sum = 0.0;
    for (dist, a, b) in pairs {
        if truth_used[a] || est_used[b] {
            continue;
        }
        truth_used[a] = true;
        est_used[b] = true;
        tp += 1;
        amp_sum += (truth.amplitudes[a] - estimate.amplitudes[b]).abs();
        loc_sum += dist as f64;
    }
    let fp = estimate.len() - tp;
    let fn_ = truth.len() - tp;
    let f1 = if truth.is_empty() && estimate.is_empty() {
        1.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
    };
    let (amplitude_error, location_error) = if tp == 0 {
        (f64::NAN, f64::NAN)
    } else {
        (amp_sum / tp as f64, loc_sum / tp as f64)
    };
    PeakMetrics {
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_,
        f1,
        amplitude_error,
        location_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn peaks_at(idx: &[usize]) -> PeakSet {
        PeakSet {
            indices: idx.to_vec(),
            amplitudes: vec![1.0; idx.len()],
            prominences: vec![1.0; idx.len()],
        }
    }

    #[test]
    fn pointwise_zero_and_constant_residual() {
        let m = pointwise_metrics(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!((m.rmse, m.mae, m.snr_db), (0.0, 0.0, SNR_CAP_DB));
        let m = pointwise_metrics(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!((m.rmse, m.mae), (1.0, 1.0));
        assert_eq!(m.snr_db, -SNR_CAP_DB);
        assert!(pointwise_metrics(&[0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn derivative_offset_invariant() {
        let t: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|v| v.sin()).collect();
        let shifted: Vec<f64> = y.iter().map(|v| v + 3.0).collect();
        let d = derivative_metrics(&y, &shifted, &t).unwrap();
        assert!(d.derivative_rmse < 1e-12);
        assert_eq!(d.feature_snr_db, d.derivative_snr_db);
    }

    #[test]
    fn monotone_has_no_peaks() {
        assert!(detect_peaks(&[0.0, 1.0, 2.0, 3.0], 0.0).is_empty());
        assert!(detect_peaks(&[3.0, 2.0, 2.0, 1.0], 0.0).is_empty());
    }

    #[test]
    fn triangle_prominence() {
        let p = detect_peaks(&[0.0, 0.5, 1.0, 0.5, 0.0], 0.05);
        assert_eq!(p.indices, vec![2]);
        assert_eq!(p.prominences, vec![1.0]);
        assert_eq!(p.amplitudes, vec![1.0]);
    }

    #[test]
    fn prominence_uses_higher_base() {
        // left base 0.2 (stopped by the higher peak at index 1), right base 0.0
        let y = [0.0, 2.0, 0.2, 1.0, 0.0];
        let p = detect_peaks(&y, 0.0);
        assert_eq!(p.indices, vec![1, 3]);
        assert_eq!(p.prominences[0], 2.0);
        assert!((p.prominences[1] - 0.8).abs() < 1e-12);
        assert_eq!(detect_peaks(&y, 0.9).indices, vec![1]);
    }

    #[test]
    fn plateau_counts_once() {
        let p = detect_peaks(&[0.0, 1.0, 1.0, 0.0], 0.0);
        assert_eq!(p.indices, vec![1]);
    }

    #[test]
    fn hand_enumerated_matching() {
        let m = peak_metrics(&peaks_at(&[10, 50]), &peaks_at(&[11, 80]), 2);
        assert_eq!((m.true_positives, m.false_positives, m.false_negatives), (1, 1, 1));
        assert_eq!(m.f1, 0.5);
        assert_eq!(m.location_error, 1.0);
        assert_eq!(m.amplitude_error, 0.0);
    }

    #[test]
    fn identical_and_empty_peak_sets() {
        let m = peak_metrics(&peaks_at(&[3, 9]), &peaks_at(&[3, 9]), 3);
        assert_eq!((m.f1, m.amplitude_error, m.location_error), (1.0, 0.0, 0.0));
        let m = peak_metrics(&peaks_at(&[3, 9]), &PeakSet::default(), 3);
        assert_eq!(m.f1, 0.0);
        assert!(m.amplitude_error.is_nan() && m.location_error.is_nan());
        let m = peak_metrics(&PeakSet::default(), &PeakSet::default(), 3);
        assert_eq!(m.f1, 1.0);
    }

    #[test]
    fn greedy_prefers_nearest() {
        // estimate 12 is nearer to truth 13 than to truth 10
        let m = peak_metrics(&peaks_at(&[10, 13]), &peaks_at(&[12]), 3);
        assert_eq!(m.true_positives, 1);
        assert_eq!(m.location_error, 1.0);
    }
}
