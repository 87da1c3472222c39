use crate::density::DensityField;
use crate::series::TimeSeries;
use crate::stats::quantile;

/// Denominators below this count as underflow in [`truncated_expectation`].
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

/// Minimum number of samples in a local window.
pub const MIN_WINDOW: usize = 4;

/// Closed amplitude interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, y: f64) -> bool {
        self.lo <= y && y <= self.hi
    }

    pub fn clamp(&self, y: f64) -> f64 {
        y.clamp(self.lo, self.hi)
    }
}

/// Values of the samples with `|t_i - t_j| <= r_t`.
///
/// With fewer than [`MIN_WINDOW`] samples inside, the radius grows to the
/// fourth-smallest distance from `t_j` (ties included). Series shorter than
/// that return every value.
pub fn local_window(series: &TimeSeries, t_j: f64, r_t: f64) -> Vec<f64> {
    let t = series.times();
    let y = series.values();
    if t.len() <= MIN_WINDOW {
        return y.to_vec();
    }
    let (start, end) = window_bounds(t, t_j, r_t);
    if end - start >= MIN_WINDOW {
        return y[start..end].to_vec();
    }
    let mut dist: Vec<f64> = t.iter().map(|&ti| (ti - t_j).abs()).collect();
    let (_, radius, _) = dist.select_nth_unstable_by(MIN_WINDOW - 1, f64::total_cmp);
    let radius = *radius;
    t.iter()
        .zip(y)
        .filter(|(&ti, _)| (ti - t_j).abs() <= radius)
        .map(|(_, &yi)| yi)
        .collect()
}

fn window_bounds(t: &[f64], t_j: f64, r_t: f64) -> (usize, usize) {
    let start = t.partition_point(|&ti| t_j - ti > r_t);
    let end = t.partition_point(|&ti| ti - t_j <= r_t);
    (start, end.max(start))
}

/// Quartile-fence interval of a window, clamped to `[0,1]`.
///
/// A zero IQR widens to `[q - halfwidth, q + halfwidth]`. If clamping leaves
/// an empty or single-point interval the result is `[0,1]`.
pub fn support_from_window(window: &[f64], iqr_multiplier: f64, degenerate_halfwidth: f64) -> Interval {
    if window.is_empty() {
        return Interval::UNIT;
    }
    let mut sorted = window.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile(&sorted, 0.25);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    let (lo, hi) = if iqr > 0.0 {
        (q1 - iqr_multiplier * iqr, q3 + iqr_multiplier * iqr)
    } else {
        (q1 - degenerate_halfwidth, q1 + degenerate_halfwidth)
    };
    let lo = lo.max(0.0);
    let hi = hi.min(1.0);
    if lo < hi {
        Interval::new(lo, hi)
    } else {
        Interval::UNIT
    }
}

/// Robust amplitude support around `t_j` on a normalized series.
pub fn local_support(
    series: &TimeSeries,
    t_j: f64,
    r_t: f64,
    iqr_multiplier: f64,
    degenerate_halfwidth: f64,
) -> Interval {
    support_from_window(&local_window(series, t_j, r_t), iqr_multiplier, degenerate_halfwidth)
}

/// Half-width used when a window has zero interquartile range.
pub fn degenerate_halfwidth(h_y: f64) -> f64 {
    (h_y / 10.0).max(1e-3)
}

/// Conditional mean of the amplitude at `t_j` restricted to `omega`.
///
/// Trapezoidal rule on `m` uniform nodes spanning `omega`. Returns `None`
/// when the density mass over `omega` underflows; otherwise the result is
/// clamped into `omega`.
pub fn truncated_expectation(field: &DensityField, t_j: f64, omega: Interval, m: usize) -> Option<f64> {
    let m = m.max(2);
    let density = field.eval_uniform_column(t_j, omega.lo, omega.hi, m);
    let step = omega.width() / (m - 1) as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, &p) in density.iter().enumerate() {
        let w = if k == 0 || k == m - 1 { 0.5 } else { 1.0 };
        let y = omega.lo + k as f64 * step;
        num += w * y * p;
        den += w * p;
    }
    if !(den >= UNDERFLOW_FLOOR) {
        return None;
    }
    Some(omega.clamp(num / den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Bandwidths;

    fn series(y: &[f64]) -> TimeSeries {
        TimeSeries::uniform(y.to_vec()).unwrap()
    }

    #[test]
    fn quartile_fence_example() {
        let omega = support_from_window(&[0.1, 0.2, 0.3, 0.4, 0.9], 1.5, 1e-3);
        assert_eq!(omega.lo, 0.0);
        assert!((omega.hi - 0.7).abs() < 1e-15);
        assert!(!omega.contains(0.9));
    }

    #[test]
    fn zero_iqr_expands() {
        let omega = support_from_window(&[0.5; 6], 1.5, 0.004);
        assert_eq!(omega, Interval::new(0.5 - 0.004, 0.5 + 0.004));
        let omega = support_from_window(&[1.0; 6], 1.5, 0.004);
        assert_eq!(omega, Interval::new(1.0 - 0.004, 1.0));
    }

    #[test]
    fn wide_window_clamps_to_unit() {
        let w: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        assert_eq!(support_from_window(&w, 1.5, 1e-3), Interval::UNIT);
    }

    #[test]
    fn out_of_range_window_falls_back() {
        assert_eq!(support_from_window(&[3.0, 3.1, 3.2, 3.3], 1.5, 1e-3), Interval::UNIT);
    }

    #[test]
    fn window_widens_to_four_samples() {
        let s = series(&[0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]);
        // spacing 0.1, radius 0.01 catches only the centre sample
        let w = local_window(&s, 0.5, 0.01);
        assert!(w.len() >= 4 && w.contains(&0.4) && w.contains(&0.6));
        let w = local_window(&s, 0.0, 0.01);
        assert_eq!(w, vec![0.0, 0.1, 0.2, 0.3]);
        let w = local_window(&s, 0.5, 0.25);
        assert_eq!(w.len(), 5);
    }

    #[test]
    fn single_source_is_recovered() {
        let field = DensityField::new(vec![0.3], vec![0.7], Bandwidths::isotropic(0.02).unwrap()).unwrap();
        let y = truncated_expectation(&field, 0.3, Interval::new(0.5, 0.9), 201).unwrap();
        assert!((y - 0.7).abs() < 1e-12, "{y}");
    }

    #[test]
    fn far_outlier_has_no_influence() {
        let bw = Bandwidths::isotropic(0.02).unwrap();
        let t = vec![0.0, 0.01, 0.02, 0.03, 0.04];
        let mut y = vec![0.3, 0.35, 0.4, 0.3, 0.35];
        let omega = Interval::new(0.0, 0.7);
        y[2] = 5.0;
        let a = truncated_expectation(&DensityField::new(t.clone(), y.clone(), bw).unwrap(), 0.02, omega, 300);
        y[2] = 50.0;
        let b = truncated_expectation(&DensityField::new(t, y, bw).unwrap(), 0.02, omega, 300);
        assert!((a.unwrap() - b.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn underflow_returns_none() {
        let field = DensityField::new(vec![0.5], vec![0.5], Bandwidths::isotropic(0.001).unwrap()).unwrap();
        assert_eq!(truncated_expectation(&field, 0.0, Interval::new(0.0, 0.1), 100), None);
    }
}
