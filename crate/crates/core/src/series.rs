//! Signal container, unit-box normalization, reflection padding and
//! finite-difference derivatives.

use crate::error::{Error, Result};

/// Minimum number of samples accepted by [`TimeSeries::new`].
pub const MIN_LEN: usize = 3;

/// Ordered `(time, value)` samples.
///
/// Guarantees:
/// - `times.len() == values.len() >= 3`
/// - all entries are finite
/// - times are strictly increasing
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::invalid(format!(
                "times ({}) and values ({}) differ in length",
                times.len(),
                values.len()
            )));
        }
        if times.len() < MIN_LEN {
            return Err(Error::invalid(format!(
                "series has {} samples, at least {MIN_LEN} required",
                times.len()
            )));
        }
        if let Some(i) = times.iter().chain(&values).position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite entry at position {i}")));
        }
        if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!(
                "times not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Self { times, values })
    }

    /// Series sampled on the uniform grid `i / (n - 1)`, `i = 0..n`.
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        let denom = n.saturating_sub(1).max(1) as f64;
        let times = (0..n).map(|i| i as f64 / denom).collect();
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// Always `false` for a constructed series.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Same timestamps, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.times.clone(), values)
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.times, self.values)
    }

    /// Skips validation. Callers must uphold the type invariants.
    pub(crate) fn from_parts_unchecked(times: Vec<f64>, values: Vec<f64>) -> Self {
        debug_assert_eq!(times.len(), values.len());
        Self { times, values }
    }
}

/// Affine maps between raw units and the unit box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizationParams {
    pub t_min: f64,
    pub t_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl NormalizationParams {
    /// True when the amplitude range collapsed to a single value.
    pub fn is_constant(&self) -> bool {
        self.y_max == self.y_min
    }

    pub fn normalize_time(&self, t: f64) -> f64 {
        (t - self.t_min) / (self.t_max - self.t_min)
    }

    pub fn normalize_value(&self, y: f64) -> f64 {
        if self.is_constant() {
            0.5
        } else {
            (y - self.y_min) / (self.y_max - self.y_min)
        }
    }

    pub fn denormalize_time(&self, t: f64) -> f64 {
        self.t_min + t * (self.t_max - self.t_min)
    }

    pub fn denormalize_value(&self, y: f64) -> f64 {
        if self.is_constant() {
            self.y_min
        } else {
            self.y_min + y * (self.y_max - self.y_min)
        }
    }

    pub fn denormalize_values(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&y| self.denormalize_value(y)).collect()
    }
}

/// Maps a series onto `[0,1] x [0,1]`.
///
/// A constant series maps to all `0.5` and records `y_min == y_max` so that
/// [`denormalize`] restores the constant.
pub fn normalize(series: &TimeSeries) -> Result<(TimeSeries, NormalizationParams)> {
    let t = series.times();
    let y = series.values();
    let (y_min, y_max) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let params = NormalizationParams {
        t_min: t[0],
        t_max: t[t.len() - 1],
        y_min,
        y_max,
    };
    let mut times: Vec<f64> = t.iter().map(|&v| params.normalize_time(v)).collect();
    // pin the endpoints so the span is exactly [0,1]
    times[0] = 0.0;
    *times.last_mut().expect("non-empty") = 1.0;
    let values = y.iter().map(|&v| params.normalize_value(v)).collect();
    let out = TimeSeries::new(times, values)?;
    Ok((out, params))
}

/// Inverse of [`normalize`].
pub fn denormalize(series: &TimeSeries, params: &NormalizationParams) -> Result<TimeSeries> {
    let times = series
        .times()
        .iter()
        .map(|&t| params.denormalize_time(t))
        .collect();
    TimeSeries::new(times, params.denormalize_values(series.values()))
}

/// Mirrors `window` samples at each end of the series.
///
/// The left block holds `(2 t_0 - t_j, y_j)` for `j = window..=1` and the right
/// block `(2 t_{n-1} - t_{n-1-j}, y_{n-1-j})` for `j = 1..=window`, so the
/// output times stay strictly increasing and the original samples sit
/// untouched in the middle.
pub fn reflect_pad(series: &TimeSeries, window: usize) -> Result<TimeSeries> {
    let n = series.len();
    if window == 0 || window >= n {
        return Err(Error::invalid(format!(
            "padding window {window} outside 1..={}",
            n - 1
        )));
    }
    let t = series.times();
    let y = series.values();
    let mut times = Vec::with_capacity(n + 2 * window);
    let mut values = Vec::with_capacity(n + 2 * window);
    for j in (1..=window).rev() {
        times.push(2.0 * t[0] - t[j]);
        values.push(y[j]);
    }
    times.extend_from_slice(t);
    values.extend_from_slice(y);
    let last = n - 1;
    for j in 1..=window {
        times.push(2.0 * t[last] - t[last - j]);
        values.push(y[last - j]);
    }
    Ok(TimeSeries::from_parts_unchecked(times, values))
}

/// Finite-difference derivative of `values` with respect to `times`.
///
/// Central differences on interior points, two-point one-sided differences at
/// the ends. `order == 2` applies the first-order operator twice.
pub fn finite_diff(values: &[f64], times: &[f64], order: usize) -> Result<Vec<f64>> {
    if values.len() != times.len() {
        return Err(Error::invalid("values and times differ in length"));
    }
    if values.len() < MIN_LEN {
        return Err(Error::invalid(format!(
            "finite differences need at least {MIN_LEN} samples, got {}",
            values.len()
        )));
    }
    match order {
        1 => Ok(first_difference(values, times)),
        2 => Ok(first_difference(&first_difference(values, times), times)),
        _ => Err(Error::invalid(format!("derivative order {order} not in {{1, 2}}"))),
    }
}

fn first_difference(y: &[f64], t: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut d = Vec::with_capacity(n);
    d.push((y[1] - y[0]) / (t[1] - t[0]));
    for i in 1..n - 1 {
        d.push((y[i + 1] - y[i - 1]) / (t[i + 1] - t[i - 1]));
    }
    d.push((y[n - 1] - y[n - 2]) / (t[n - 1] - t[n - 2]));
    d
}
