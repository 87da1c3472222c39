//! Classical and robust training-free smoothing baselines.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::stats::median;

/// Consistency constant turning a MAD into a Gaussian standard deviation.
const MAD_SCALE: f64 = 1.4826;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaselineKind {
    MovingAverage,
    GaussianFilter,
    MedianFilter,
    SavitzkyGolay,
    TrimmedMean,
    HampelSg,
    NadarayaWatson,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 7] = [
        BaselineKind::MovingAverage,
        BaselineKind::GaussianFilter,
        BaselineKind::MedianFilter,
        BaselineKind::SavitzkyGolay,
        BaselineKind::TrimmedMean,
        BaselineKind::HampelSg,
        BaselineKind::NadarayaWatson,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::MovingAverage => "moving_average",
            BaselineKind::GaussianFilter => "gaussian_filter",
            BaselineKind::MedianFilter => "median_filter",
            BaselineKind::SavitzkyGolay => "savitzky_golay",
            BaselineKind::TrimmedMean => "trimmed_mean",
            BaselineKind::HampelSg => "hampel_sg",
            BaselineKind::NadarayaWatson => "nadaraya_watson",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config(format!("unknown baseline `{s}`")))
    }
}

/// Baseline method and its hyperparameters. Fields a kind does not use are
/// still validated.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineSpec {
    pub kind: BaselineKind,
    /// Odd window length in samples.
    pub window: usize,
    /// Savitzky-Golay polynomial order.
    pub polyorder: usize,
    /// Gaussian filter standard deviation, in samples. Weights are truncated
    /// at `4 sigma`.
    pub sigma: f64,
    /// Fraction discarded from each tail by the trimmed mean.
    pub trim: f64,
    /// Hampel rejection threshold in robust standard deviations.
    pub hampel_threshold: f64,
    /// Nadaraya-Watson bandwidth in normalized time (fraction of the span).
    pub bandwidth: f64,
}

impl BaselineSpec {
    pub fn new(kind: BaselineKind) -> Self {
        Self {
            kind,
            window: 11,
            polyorder: 3,
            sigma: 2.0,
            trim: 0.2,
            hampel_threshold: 3.0,
            bandwidth: 0.02,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window % 2 == 0 {
            return Err(Error::config(format!("window {} must be odd and >= 3", self.window)));
        }
        let fits_polynomial = matches!(self.kind, BaselineKind::SavitzkyGolay | BaselineKind::HampelSg);
        if fits_polynomial && self.polyorder >= self.window {
            return Err(Error::config("polyorder must be below the window length"));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::config("sigma must be finite and positive"));
        }
        if !(0.0..0.5).contains(&self.trim) {
            return Err(Error::config("trim must lie in [0, 0.5)"));
        }
        if !(self.hampel_threshold.is_finite() && self.hampel_threshold >= 0.0) {
            return Err(Error::config("hampel threshold must be finite and non-negative"));
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return Err(Error::config("bandwidth must be finite and positive"));
        }
        Ok(())
    }
}

/// Runs a baseline; output keeps the input timestamps.
pub fn apply_baseline(series: &TimeSeries, spec: &BaselineSpec) -> Result<TimeSeries> {
    spec.validate()?;
    let y = series.values();
    let half = spec.window / 2;
    let out = match spec.kind {
        BaselineKind::MovingAverage => {
            window_map(y, half, |w| w.iter().sum::<f64>() / w.len() as f64)
        }
        BaselineKind::GaussianFilter => gaussian_filter(y, spec.sigma),
        BaselineKind::MedianFilter => window_map(y, half, median),
        BaselineKind::SavitzkyGolay => savitzky_golay(y, spec.window, spec.polyorder)?,
        BaselineKind::TrimmedMean => window_map(y, half, |w| {
            let mut s = w.to_vec();
            s.sort_by(f64::total_cmp);
            let cut = (spec.trim * s.len() as f64).floor() as usize;
            let kept = &s[cut..s.len() - cut];
            kept.iter().sum::<f64>() / kept.len() as f64
        }),
        BaselineKind::HampelSg => {
            let cleaned = hampel(y, half, spec.hampel_threshold);
            savitzky_golay(&cleaned, spec.window, spec.polyorder)?
        }
        BaselineKind::NadarayaWatson => {
            let t = series.times();
            let span = t[t.len() - 1] - t[0];
            nw_regression(series, spec.bandwidth * span, t)?
        }
    };
    series.with_values(out)
}

/// Kernel-weighted mean `sum y_i K_h(t - t_i) / sum K_h(t - t_i)` with a 1D
/// Gaussian kernel, evaluated at each query time.
///
/// When every weight underflows the value of the nearest sample is returned.
pub fn nw_regression(series: &TimeSeries, bandwidth: f64, query_times: &[f64]) -> Result<Vec<f64>> {
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(Error::invalid("bandwidth must be finite and positive"));
    }
    let t = series.times();
    let y = series.values();
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let c = 0.5 / (bandwidth * bandwidth);
    Ok(query_times
        .iter()
        .map(|&q| {
            let mut num = 0.0;
            let mut den = 0.0;
            for (&ti, &yi) in t.iter().zip(y) {
                let d = q - ti;
                let w = (-d * d * c).exp();
                num += w * yi;
                den += w;
            }
            if den > 0.0 {
                (num / den).clamp(lo, hi)
            } else {
                y[nearest_index(t, q)]
            }
        })
        .collect())
}

fn nearest_index(t: &[f64], q: f64) -> usize {
    let i = t.partition_point(|&v| v < q);
    if i == 0 {
        0
    } else if i == t.len() || q - t[i - 1] <= t[i] - q {
        i - 1
    } else {
        i
    }
}

/// Mirror index into `0..n` without repeating the edge sample.
fn reflect(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let r = i.rem_euclid(period);
    if r >= n as isize {
        (period - r) as usize
    } else {
        r as usize
    }
}

fn window_map(y: &[f64], half: usize, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let n = y.len();
    let mut buf = Vec::with_capacity(2 * half + 1);
    (0..n)
        .map(|i| {
            buf.clear();
            let centre = i as isize;
            buf.extend((-(half as isize)..=half as isize).map(|k| y[reflect(centre + k, n)]));
            f(&buf)
        })
        .collect()
}

fn gaussian_filter(y: &[f64], sigma: f64) -> Vec<f64> {
    let radius = (4.0 * sigma).ceil() as isize;
    let raw: Vec<f64> = (-radius..=radius)
        .map(|k| (-0.5 * (k as f64 / sigma).powi(2)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let n = y.len();
    (0..n as isize)
        .map(|i| {
            weights
                .iter()
                .zip(-radius..=radius)
                .map(|(w, k)| w * y[reflect(i + k, n)])
                .sum()
        })
        .collect()
}

fn hampel(y: &[f64], half: usize, threshold: f64) -> Vec<f64> {
    let n = y.len();
    (0..n)
        .map(|i| {
            let w: Vec<f64> = (-(half as isize)..=half as isize)
                .map(|k| y[reflect(i as isize + k, n)])
                .collect();
            let med = median(&w);
            let dev: Vec<f64> = w.iter().map(|v| (v - med).abs()).collect();
            let mad = median(&dev);
            if (y[i] - med).abs() > threshold * MAD_SCALE * mad {
                med
            } else {
                y[i]
            }
        })
        .collect()
}

/// Least-squares weights that evaluate a degree-`order` polynomial fitted to
/// `window` equally spaced samples at sample position `pos` (0-based).
fn polyfit_weights(window: usize, order: usize, pos: f64) -> Result<Vec<f64>> {
    let half = (window - 1) as f64 / 2.0;
    let scale = half.max(1.0);
    let basis = |x: f64| -> Vec<f64> {
        let z = (x - half) / scale;
        (0..=order).map(|j| z.powi(j as i32)).collect()
    };
    let mut vander = DMatrix::<f64>::zeros(window, order + 1);
    for k in 0..window {
        for (j, v) in basis(k as f64).into_iter().enumerate() {
            vander[(k, j)] = v;
        }
    }
    let gram = vander.transpose() * &vander;
    let phi = DVector::from_vec(basis(pos));
    let z = gram
        .lu()
        .solve(&phi)
        .ok_or_else(|| Error::config("singular Savitzky-Golay system"))?;
    Ok((vander * z).iter().copied().collect())
}

/// Savitzky-Golay smoothing. Edge samples are read off the polynomial fitted
/// to the first or last full window, so polynomials up to `polyorder` are
/// reproduced everywhere. Series shorter than the window shrink it.
fn savitzky_golay(y: &[f64], window: usize, polyorder: usize) -> Result<Vec<f64>> {
    let n = y.len();
    let window = if window > n { n - (1 - n % 2) } else { window };
    let polyorder = polyorder.min(window - 1);
    let half = window / 2;
    let centre = polyfit_weights(window, polyorder, half as f64)?;
    let mut out = vec![0.0; n];
    for i in half..n - half {
        out[i] = centre.iter().zip(&y[i - half..=i + half]).map(|(w, v)| w * v).sum();
    }
    for i in 0..half {
        let w = polyfit_weights(window, polyorder, i as f64)?;
        out[i] = w.iter().zip(&y[..window]).map(|(w, v)| w * v).sum();
        let w = polyfit_weights(window, polyorder, (window - 1 - i) as f64)?;
        out[n - 1 - i] = w.iter().zip(&y[n - window..]).map(|(w, v)| w * v).sum();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(y: &[f64]) -> TimeSeries {
        TimeSeries::uniform(y.to_vec()).unwrap()
    }

    fn spec(kind: BaselineKind, window: usize) -> BaselineSpec {
        BaselineSpec { window, ..BaselineSpec::new(kind) }
    }

    #[test]
    fn reflect_indices() {
        let got: Vec<usize> = (-3..8).map(|i| reflect(i, 5)).collect();
        assert_eq!(got, vec![3, 2, 1, 0, 1, 2, 3, 4, 3, 2, 1]);
    }

    #[test]
    fn moving_average_window_three() {
        let out = apply_baseline(&uniform(&[0.0, 3.0, 0.0, 3.0, 0.0]), &spec(BaselineKind::MovingAverage, 3))
            .unwrap();
        assert_eq!(out.values(), &[2.0, 1.0, 2.0, 1.0, 2.0]);
    }

    #[test]
    fn median_removes_single_spike() {
        let out = apply_baseline(&uniform(&[0.0, 0.0, 9.0, 0.0, 0.0]), &spec(BaselineKind::MedianFilter, 3))
            .unwrap();
        assert_eq!(out.values(), &[0.0; 5]);
    }

    #[test]
    fn savitzky_golay_reproduces_quadratic() {
        let y: Vec<f64> = (0..30).map(|i| 0.3 * (i * i) as f64 - 2.0 * i as f64 + 1.0).collect();
        let s = BaselineSpec { polyorder: 2, ..spec(BaselineKind::SavitzkyGolay, 5) };
        let out = apply_baseline(&uniform(&y), &s).unwrap();
        for (a, b) in out.values().iter().zip(&y) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn savitzky_golay_short_series_shrinks_window() {
        let y = [1.0, 2.0, 3.0, 4.0];
        let out = apply_baseline(&uniform(&y), &BaselineSpec::new(BaselineKind::SavitzkyGolay)).unwrap();
        for (a, b) in out.values().iter().zip(&y) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn trimmed_mean_drops_tails() {
        // window of 5 with trim 0.2 discards one sample per tail
        let s = BaselineSpec { trim: 0.2, ..spec(BaselineKind::TrimmedMean, 5) };
        let out = apply_baseline(&uniform(&[1.0, 1.0, 100.0, 1.0, 1.0, 1.0]), &s).unwrap();
        assert_eq!(out.values()[2], 1.0);
    }

    #[test]
    fn hampel_replaces_outlier() {
        let mut y: Vec<f64> = (0..40).map(|i| (i as f64 * 0.2).sin()).collect();
        y[20] += 10.0;
        let cleaned = hampel(&y, 5, 3.0);
        assert!((cleaned[20] - (20.0f64 * 0.2).sin()).abs() < 0.2);
        assert_eq!(cleaned[10], y[10]);
    }

    #[test]
    fn gaussian_filter_weights_normalized() {
        let out = apply_baseline(&uniform(&[2.5; 12]), &BaselineSpec::new(BaselineKind::GaussianFilter)).unwrap();
        assert!(out.values().iter().all(|v| (v - 2.5).abs() < 1e-12));
    }

    #[test]
    fn nw_tiny_bandwidth_hits_sample() {
        let s = uniform(&[0.3, 0.9, 0.1, 0.4]);
        let v = nw_regression(&s, 1e-4, &[s.times()[1]]).unwrap();
        assert_eq!(v, vec![0.9]);
        // all weights underflow: nearest sample
        let v = nw_regression(&s, 1e-6, &[0.30]).unwrap();
        assert_eq!(v, vec![0.9]);
    }

    #[test]
    fn invalid_specs_rejected() {
        let series = uniform(&[0.0; 8]);
        for bad in [
            spec(BaselineKind::MovingAverage, 4),
            spec(BaselineKind::MovingAverage, 1),
            BaselineSpec { polyorder: 11, ..BaselineSpec::new(BaselineKind::SavitzkyGolay) },
            BaselineSpec { trim: 0.5, ..BaselineSpec::new(BaselineKind::TrimmedMean) },
            BaselineSpec { bandwidth: 0.0, ..BaselineSpec::new(BaselineKind::NadarayaWatson) },
        ] {
            assert!(matches!(apply_baseline(&series, &bad), Err(Error::Config(_))));
        }
        assert!("wavelet".parse::<BaselineKind>().is_err());
    }
}
