use cascade_kde::baselines::{apply_baseline, nw_regression, BaselineKind, BaselineSpec};
use cascade_kde::corruption::{corrupt, CorruptionKind, CorruptionSpec};
use cascade_kde::density::{Bandwidths, DensityField};
use cascade_kde::metrics::{detect_peaks, peak_metrics, pointwise_metrics, MetricsReport, PeakSet, SNR_CAP_DB};
use cascade_kde::restoration::{
    cascade_stage, local_support, restore, stage_support, truncated_expectation, Interval, RestorationConfig,
    Variants,
};
use cascade_kde::series::{denormalize, normalize, reflect_pad, TimeSeries};
use proptest::prelude::*;

fn values(min_len: usize, max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, min_len..=max_len)
}

fn unit_series(y: Vec<f64>) -> TimeSeries {
    TimeSeries::uniform(y).unwrap()
}

/// Strictly increasing times from positive gaps.
fn irregular(min_len: usize, max_len: usize) -> impl Strategy<Value = TimeSeries> {
    prop::collection::vec((0.01f64..1.0, -5.0f64..5.0), min_len..=max_len).prop_map(|pts| {
        let mut t = 0.0;
        let mut times = Vec::new();
        let mut vals = Vec::new();
        for (gap, y) in pts {
            t += gap;
            times.push(t);
            vals.push(y);
        }
        TimeSeries::new(times, vals).unwrap()
    })
}

fn pareto_config() -> RestorationConfig {
    RestorationConfig { k_max: 3, ..Default::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_round_trips(s in irregular(3, 60)) {
        let (n, p) = normalize(&s).unwrap();
        prop_assert_eq!(n.times()[0], 0.0);
        prop_assert_eq!(*n.times().last().unwrap(), 1.0);
        prop_assert!(n.values().iter().all(|v| (0.0..=1.0).contains(v)));
        let back = denormalize(&n, &p).unwrap();
        for (a, b) in back.values().iter().zip(s.values()) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn padding_keeps_originals(s in irregular(4, 60), w in 1usize..30) {
        let w = w.min(s.len() - 1);
        let p = reflect_pad(&s, w).unwrap();
        prop_assert_eq!(p.len(), s.len() + 2 * w);
        prop_assert_eq!(&p.values()[w..w + s.len()], s.values());
        prop_assert_eq!(&p.times()[w..w + s.len()], s.times());
        prop_assert!(p.times().windows(2).all(|t| t[0] < t[1]));
    }

    #[test]
    fn support_is_nonempty_subset_of_unit(y in values(1, 40), m in 0.0f64..3.0) {
        let s = TimeSeries::uniform([y.clone(), vec![0.5; 3]].concat()).unwrap();
        let omega = local_support(&s, 0.5, 0.1, m, 1e-3);
        prop_assert!(0.0 <= omega.lo && omega.lo < omega.hi && omega.hi <= 1.0);
    }

    #[test]
    fn estimate_lies_in_support(y in values(12, 50), k in 1usize..4) {
        let s = unit_series(y);
        let config = RestorationConfig::default();
        let out = cascade_stage(&s, k, &config).unwrap();
        let bw = config.stage_bandwidths(k, &s).unwrap();
        for (&t, &v) in s.times().iter().zip(out.values()) {
            let omega = stage_support(&s, t, bw, &config);
            prop_assert!(omega.contains(v), "{v} outside {omega:?}");
        }
    }

    #[test]
    fn truncated_expectation_in_interval(
        pts in prop::collection::vec((0.0f64..1.0, -2.0f64..3.0), 1..30),
        t in 0.0f64..1.0,
        lo in 0.0f64..0.5,
        width in 0.01f64..0.5,
    ) {
        let (ts, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let field = DensityField::new(ts, ys, Bandwidths::isotropic(0.05).unwrap()).unwrap();
        let omega = Interval::new(lo, lo + width);
        if let Some(v) = truncated_expectation(&field, t, omega, 120) {
            prop_assert!(omega.contains(v));
        }
    }

    #[test]
    fn density_is_non_negative(
        pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..20),
        t in -0.5f64..1.5,
        y in -0.5f64..1.5,
    ) {
        let (ts, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let field = DensityField::new(ts, ys, Bandwidths::new(0.03, 0.07).unwrap()).unwrap();
        prop_assert!(field.eval(t, y) >= 0.0);
    }

    #[test]
    fn baselines_preserve_length_and_times(y in values(5, 60)) {
        let s = unit_series(y);
        for kind in BaselineKind::ALL {
            let out = apply_baseline(&s, &BaselineSpec::new(kind)).unwrap();
            prop_assert_eq!(out.times(), s.times());
        }
    }

    #[test]
    fn corruption_is_seed_deterministic(y in values(40, 80), seed in any::<u64>(), kind_idx in 0usize..7) {
        let s = unit_series(y);
        let spec = CorruptionSpec { seed, ..CorruptionSpec::new(CorruptionKind::ALL[kind_idx]) };
        match (corrupt(&s, &spec), corrupt(&s, &spec)) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(&a, &b);
                prop_assert_eq!(a.0.times(), s.times());
                prop_assert_eq!(a.1.len(), s.len());
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "nondeterministic failure"),
        }
    }

    #[test]
    fn metrics_zero_on_identical(s in irregular(3, 60)) {
        let m = MetricsReport::compute(&s, &s, 0.05, 3).unwrap();
        prop_assert_eq!(m.rmse, 0.0);
        prop_assert_eq!(m.mae, 0.0);
        prop_assert_eq!(m.snr_db, SNR_CAP_DB);
        prop_assert_eq!(m.derivative_rmse, 0.0);
        prop_assert_eq!(m.peak_f1, 1.0);
        prop_assert!(m.peak_amplitude_error == 0.0 || m.peak_amplitude_error.is_nan());
    }

    #[test]
    fn metric_ranges(a in values(8, 40), b in values(8, 40)) {
        let n = a.len().min(b.len());
        let p = pointwise_metrics(&a[..n], &b[..n]).unwrap();
        prop_assert!(p.rmse >= p.mae - 1e-15);
        prop_assert!((-SNR_CAP_DB..=SNR_CAP_DB).contains(&p.snr_db));
        let pa = detect_peaks(&a[..n], 0.05);
        let pb = detect_peaks(&b[..n], 0.05);
        let m = peak_metrics(&pa, &pb, 3);
        let r = peak_metrics(&pb, &pa, 3);
        prop_assert!((0.0..=1.0).contains(&m.f1));
        prop_assert_eq!(m.f1, r.f1);
        prop_assert_eq!(m.true_positives + m.false_negatives, pa.len());
        prop_assert_eq!(m.true_positives + m.false_positives, pb.len());
    }

    #[test]
    fn peak_f1_edge_cases(idx in prop::collection::btree_set(0usize..200, 1..10)) {
        let set = PeakSet {
            indices: idx.iter().copied().collect(),
            amplitudes: vec![1.0; idx.len()],
            prominences: vec![1.0; idx.len()],
        };
        prop_assert_eq!(peak_metrics(&set, &set, 0).f1, 1.0);
        prop_assert_eq!(peak_metrics(&set, &PeakSet::default(), 3).f1, 0.0);
        prop_assert_eq!(peak_metrics(&PeakSet::default(), &set, 3).f1, 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn restore_is_deterministic(y in values(20, 80)) {
        let s = unit_series(y);
        let a = restore(&s, &pareto_config()).unwrap();
        let b = restore(&s, &pareto_config()).unwrap();
        prop_assert_eq!(&a, &b);
        let par = restore(&s, &RestorationConfig { parallel: true, ..pareto_config() }).unwrap();
        prop_assert_eq!(a, par);
    }

    #[test]
    fn selected_depth_maximizes_score(y in values(20, 80)) {
        let config = pareto_config();
        let (_, trace) = restore(&unit_series(y), &config).unwrap();
        prop_assert!((1..=config.k_max).contains(&trace.selected));
        prop_assert!(!trace.stages.is_empty() && trace.stages.len() <= config.k_max);
        prop_assert!(trace.stages.iter().enumerate().all(|(i, r)| r.k == i + 1));
        let best = trace.selected_record().unwrap().pareto.score;
        prop_assert!(trace.stages.iter().all(|r| r.pareto.score <= best));
    }

    #[test]
    fn constant_series_are_fixed_points(c in -100.0f64..100.0, n in 5usize..60) {
        let s = TimeSeries::uniform(vec![c; n]).unwrap();
        let (out, _) = restore(&s, &pareto_config()).unwrap();
        prop_assert!(out.values().iter().all(|&v| v == c));
        let half = TimeSeries::uniform(vec![0.5; n]).unwrap();
        let stage = cascade_stage(&half, 2, &RestorationConfig::default()).unwrap();
        prop_assert!(stage.values().iter().all(|v| (v - 0.5).abs() < 1e-12));
    }

    #[test]
    fn dense_untruncated_cascade_matches_nw(s in irregular(50, 50)) {
        let config = RestorationConfig {
            k_max: 1,
            grid_size: Some(2000),
            variants: Variants { no_truncation: true, no_padding: true, fixed_grid: true, ..Default::default() },
            ..Default::default()
        };
        let (out, _) = restore(&s, &config).unwrap();
        let span = s.times()[49] - s.times()[0];
        let nw = nw_regression(&s, config.bw0 * span, s.times()).unwrap();
        let scale = s.values().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for (a, b) in out.values().iter().zip(&nw) {
            prop_assert!((a - b).abs() <= 1e-6 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn outlier_influence_is_bounded(
        phase in 0.0f64..6.3,
        jitter in prop::collection::vec(-0.05f64..0.05, 100),
        idx in 20usize..80,
    ) {
        let base: Vec<f64> = jitter
            .iter()
            .enumerate()
            .map(|(i, e)| 0.5 + 0.4 * (phase + 12.0 * i as f64 / 99.0).sin() + e)
            .collect();
        let config = RestorationConfig::default();
        let mut prev: Option<f64> = None;
        let mut prev_change = f64::INFINITY;
        for amp in [2.0, 5.0, 10.0, 50.0] {
            let mut y = base.clone();
            y[idx] = amp;
            let out = cascade_stage(&unit_series(y), 1, &config).unwrap();
            let v = out.values()[idx];
            if let Some(p) = prev {
                let change = (v - p).abs();
                prop_assert!(change <= prev_change);
                prop_assert!(change < 1e-9);
                prev_change = change;
            }
            prev = Some(v);
        }
    }

    #[test]
    fn influence_decays_with_distance_from_support(
        pts in prop::collection::vec((0.0f64..1.0, 0.0f64..0.7), 5..30),
        t in 0.2f64..0.8,
    ) {
        let omega = Interval::new(0.0, 0.7);
        let h = 0.05;
        let estimate = |amp: f64| {
            let (mut ts, mut ys): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
            ts.push(t);
            ys.push(amp);
            let field = DensityField::new(ts, ys, Bandwidths::isotropic(h).unwrap()).unwrap();
            truncated_expectation(&field, t, omega, 300).unwrap()
        };
        let amps = [0.8, 0.9, 1.0, 1.2, 1.5, 2.0];
        let est: Vec<f64> = amps.iter().map(|&a| estimate(a)).collect();
        let changes: Vec<f64> = est.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        // Gaussian tail bound exp(-d^2 / 2h^2) with the constant fitted on the first step
        let tail = |a: f64| (-(a - omega.hi).powi(2) / (2.0 * h * h)).exp();
        let c = changes[0] / tail(amps[0]);
        for (i, ch) in changes.iter().enumerate() {
            prop_assert!(*ch <= c * tail(amps[i]) * (1.0 + 1e-6) + 1e-15, "step {i}: {ch}");
        }
        prop_assert!(changes.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }
}
