//! Seeded corruption scenarios and clean synthetic ground-truth signals.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::metrics::{detect_peaks, DEFAULT_PROMINENCE};
use crate::series::TimeSeries;

/// Impulse values are clipped into this range unless clipping is disabled.
pub const IMPULSE_CLIP: (f64, f64) = (-0.25, 1.25);

/// Accepted amplitude range for inputs to [`corrupt`].
pub const NORMALIZED_RANGE: (f64, f64) = (-0.01, 1.01);

/// Samples either side of a ground-truth peak eligible for near-peak impulses.
pub const NEAR_PEAK_RADIUS: usize = 3;

pub const MIN_SYNTHETIC_LEN: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CorruptionKind {
    Gaussian,
    Impulse,
    Mixed,
    MissingSegment,
    SpikeCluster,
    DriftPlusImpulse,
    NearPeakImpulse,
}

impl CorruptionKind {
    pub const ALL: [CorruptionKind; 7] = [
        CorruptionKind::Gaussian,
        CorruptionKind::Impulse,
        CorruptionKind::Mixed,
        CorruptionKind::MissingSegment,
        CorruptionKind::SpikeCluster,
        CorruptionKind::DriftPlusImpulse,
        CorruptionKind::NearPeakImpulse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CorruptionKind::Gaussian => "gaussian",
            CorruptionKind::Impulse => "impulse",
            CorruptionKind::Mixed => "mixed",
            CorruptionKind::MissingSegment => "missing_segment",
            CorruptionKind::SpikeCluster => "spike_cluster",
            CorruptionKind::DriftPlusImpulse => "drift_plus_impulse",
            CorruptionKind::NearPeakImpulse => "near_peak_impulse",
        }
    }
}

impl fmt::Display for CorruptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CorruptionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown corruption kind `{s}`")))
    }
}

/// One corruption scenario. Fields irrelevant to `kind` are ignored but must
/// be finite.
#[derive(Clone, Debug, PartialEq)]
pub struct CorruptionSpec {
    pub kind: CorruptionKind,
    /// Gaussian standard deviation, normalized units.
    pub sigma: f64,
    /// Fraction of corrupted samples.
    pub ratio: f64,
    /// Impulse magnitude (and drift height), normalized units.
    pub amplitude: f64,
    pub seed: u64,
    /// Clip impulse values into [`IMPULSE_CLIP`].
    pub clip_impulses: bool,
}

impl CorruptionSpec {
    pub fn new(kind: CorruptionKind) -> Self {
        Self {
            kind,
            ..Self::default()
        }
    }

    /// Gaussian-plus-impulse benchmark setting: sigma 0.10, ratio 0.10,
    /// amplitude 0.50.
    pub fn mixed_benchmark(seed: u64) -> Self {
        Self {
            kind: CorruptionKind::Mixed,
            sigma: 0.10,
            ratio: 0.10,
            amplitude: 0.50,
            seed,
            clip_impulses: true,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("sigma", self.sigma), ("ratio", self.ratio), ("amplitude", self.amplitude)] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite")));
            }
        }
        if self.sigma < 0.0 {
            return Err(Error::invalid("sigma must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.ratio) {
            return Err(Error::invalid("ratio must lie in [0, 1]"));
        }
        if self.amplitude < 0.0 {
            return Err(Error::invalid("amplitude must be non-negative"));
        }
        Ok(())
    }
}

impl Default for CorruptionSpec {
    fn default() -> Self {
        Self {
            kind: CorruptionKind::Mixed,
            sigma: 0.10,
            ratio: 0.10,
            amplitude: 0.50,
            seed: 1,
            clip_impulses: true,
        }
    }
}

/// Applies `spec` to a series whose amplitudes lie in the unit box.
///
/// Returns the corrupted series and a mask marking exactly the impulse or
/// missing-segment indices.
pub fn corrupt(series: &TimeSeries, spec: &CorruptionSpec) -> Result<(TimeSeries, Vec<bool>)> {
    spec.validate()?;
    let (lo, hi) = NORMALIZED_RANGE;
    if let Some(i) = series.values().iter().position(|v| !(lo..=hi).contains(v)) {
        return Err(Error::invalid(format!(
            "value {} at index {i} outside the normalized range [{lo}, {hi}]",
            series.values()[i]
        )));
    }

    let n = series.len();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut y = series.values().to_vec();
    let mut mask = vec![false; n];
    let count = || -> Result<usize> {
        let raw = spec.ratio * n as f64;
        if raw < 1.0 {
            return Err(Error::invalid(format!(
                "ratio {} corrupts fewer than one of {n} samples",
                spec.ratio
            )));
        }
        Ok(raw.ceil() as usize)
    };

    match spec.kind {
        CorruptionKind::Gaussian => add_gaussian(&mut y, spec.sigma, &mut rng)?,
        CorruptionKind::Impulse => {
            let idx = sample(&mut rng, n, count()?).into_vec();
            apply_impulses(&mut y, &mut mask, &idx, spec, &mut rng);
        }
        CorruptionKind::Mixed => {
            add_gaussian(&mut y, spec.sigma, &mut rng)?;
            let idx = sample(&mut rng, n, count()?).into_vec();
            apply_impulses(&mut y, &mut mask, &idx, spec, &mut rng);
        }
        CorruptionKind::MissingSegment => {
            let len = count()?;
            if len >= n {
                return Err(Error::invalid("missing segment would cover the whole series"));
            }
            // the segment starts at 1 or later so a last valid value exists
            let start = rng.random_range(1..=n - len);
            let held = y[start - 1];
            for i in start..start + len {
                y[i] = held;
                mask[i] = true;
            }
        }
        CorruptionKind::SpikeCluster => {
            count()?;
            let runs = (spec.ratio * n as f64 / 3.0).ceil() as usize;
            if 3 * runs > n {
                return Err(Error::invalid("spike clusters do not fit in the series"));
            }
            // uniform non-overlapping runs: pick sorted slots then spread them
            let mut slots = sample(&mut rng, n - 2 * runs, runs).into_vec();
            slots.sort_unstable();
            for (k, slot) in slots.into_iter().enumerate() {
                let start = slot + 2 * k;
                let sign = random_sign(&mut rng);
                for i in start..start + 3 {
                    y[i] = impulse_value(y[i], sign, spec);
                    mask[i] = true;
                }
            }
        }
        CorruptionKind::DriftPlusImpulse => {
            let t = series.times();
            let (t0, t1) = (t[0], t[n - 1]);
            for (v, &ti) in y.iter_mut().zip(t) {
                *v += spec.amplitude * (ti - t0) / (t1 - t0);
            }
            let idx = sample(&mut rng, n, count()?).into_vec();
            apply_impulses(&mut y, &mut mask, &idx, spec, &mut rng);
        }
        CorruptionKind::NearPeakImpulse => {
            let peaks = detect_peaks(series.values(), DEFAULT_PROMINENCE);
            if peaks.is_empty() {
                return Err(Error::invalid("near-peak impulses need at least one peak"));
            }
            let mut eligible = vec![false; n];
            for &p in &peaks.indices {
                let lo = p.saturating_sub(NEAR_PEAK_RADIUS);
                let hi = (p + NEAR_PEAK_RADIUS).min(n - 1);
                eligible[lo..=hi].iter_mut().for_each(|e| *e = true);
            }
            let candidates: Vec<usize> = (0..n).filter(|&i| eligible[i]).collect();
            let k = count()?.min(candidates.len());
            let picks = sample(&mut rng, candidates.len(), k).into_vec();
            let idx: Vec<usize> = picks.into_iter().map(|p| candidates[p]).collect();
            apply_impulses(&mut y, &mut mask, &idx, spec, &mut rng);
        }
    }

    Ok((series.with_values(y)?, mask))
}

fn add_gaussian(y: &mut [f64], sigma: f64, rng: &mut ChaCha8Rng) -> Result<()> {
    if sigma == 0.0 {
        return Ok(());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::invalid(e.to_string()))?;
    for v in y.iter_mut() {
        *v += normal.sample(rng);
    }
    Ok(())
}

fn random_sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

fn impulse_value(base: f64, sign: f64, spec: &CorruptionSpec) -> f64 {
    let v = base + sign * spec.amplitude;
    if spec.clip_impulses {
        v.clamp(IMPULSE_CLIP.0, IMPULSE_CLIP.1)
    } else {
        v
    }
}

fn apply_impulses(
    y: &mut [f64],
    mask: &mut [bool],
    indices: &[usize],
    spec: &CorruptionSpec,
    rng: &mut ChaCha8Rng,
) {
    for &i in indices {
        let sign = random_sign(rng);
        y[i] = impulse_value(y[i], sign, spec);
        mask[i] = true;
    }
}

/// Clean synthetic signal families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SignalKind {
    /// `(sin(2 pi f t) + 1) / 2`.
    Sine { frequency: f64 },
    /// Separated Gaussian bumps with heights cycling 1.0, 0.75, 0.5.
    MultiPeak { peaks: usize },
    /// `0.5 + 0.5 exp(-decay t) cos(2 pi f t)`.
    DampedOscillation { frequency: f64, decay: f64 },
    /// Slow linear fade followed by an accelerating drop after `knee`.
    DegradationCurve { knee: f64 },
}

impl SignalKind {
    pub const NAMES: [&'static str; 4] = ["sine", "multi_peak", "damped_oscillation", "degradation_curve"];

    /// Kind with its default parameters.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "sine" => Ok(SignalKind::Sine { frequency: 2.0 }),
            "multi_peak" => Ok(SignalKind::MultiPeak { peaks: 3 }),
            "damped_oscillation" => Ok(SignalKind::DampedOscillation { frequency: 5.0, decay: 3.0 }),
            "degradation_curve" => Ok(SignalKind::DegradationCurve { knee: 0.6 }),
            other => Err(Error::invalid(format!("unknown signal kind `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SignalKind::Sine { .. } => "sine",
            SignalKind::MultiPeak { .. } => "multi_peak",
            SignalKind::DampedOscillation { .. } => "damped_oscillation",
            SignalKind::DegradationCurve { .. } => "degradation_curve",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticSignalSpec {
    pub kind: SignalKind,
    pub length: usize,
}

impl SyntheticSignalSpec {
    pub fn new(kind: SignalKind, length: usize) -> Self {
        Self { kind, length }
    }

    pub fn validate(&self) -> Result<()> {
        if self.length < MIN_SYNTHETIC_LEN {
            return Err(Error::invalid(format!(
                "synthetic length {} below minimum {MIN_SYNTHETIC_LEN}",
                self.length
            )));
        }
        let finite_positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be finite and positive")))
            }
        };
        match self.kind {
            SignalKind::Sine { frequency } => finite_positive("frequency", frequency),
            SignalKind::MultiPeak { peaks } => {
                if (2..=self.length / 16).contains(&peaks) {
                    Ok(())
                } else {
                    Err(Error::invalid(format!(
                        "multi_peak needs 2..={} peaks, got {peaks}",
                        self.length / 16
                    )))
                }
            }
            SignalKind::DampedOscillation { frequency, decay } => {
                finite_positive("frequency", frequency)?;
                if decay.is_finite() && decay >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid("decay must be finite and non-negative"))
                }
            }
            SignalKind::DegradationCurve { knee } => {
                if knee.is_finite() && knee > 0.0 && knee < 1.0 {
                    Ok(())
                } else {
                    Err(Error::invalid("knee must lie in (0, 1)"))
                }
            }
        }
    }
}

/// Deterministic clean signal on a uniform grid over `[0, 1]`.
pub fn generate_clean(spec: &SyntheticSignalSpec) -> Result<TimeSeries> {
    spec.validate()?;
    let n = spec.length;
    let t: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let values: Vec<f64> = match spec.kind {
        SignalKind::Sine { frequency } => t
            .iter()
            .map(|&x| ((2.0 * PI * frequency * x).sin() + 1.0) / 2.0)
            .collect(),
        SignalKind::MultiPeak { peaks } => {
            let width = 0.12 / peaks as f64;
            let raw: Vec<f64> = t
                .iter()
                .map(|&x| {
                    (0..peaks)
                        .map(|p| {
                            let centre = (p as f64 + 0.5) / peaks as f64;
                            let height = 1.0 - 0.25 * (p % 3) as f64;
                            let z = (x - centre) / width;
                            height * (-0.5 * z * z).exp()
                        })
                        .sum()
                })
                .collect();
            rescale_unit(&raw)
        }
        SignalKind::DampedOscillation { frequency, decay } => t
            .iter()
            .map(|&x| 0.5 + 0.5 * (-decay * x).exp() * (2.0 * PI * frequency * x).cos())
            .collect(),
        SignalKind::DegradationCurve { knee } => t
            .iter()
            .map(|&x| {
                let late = ((x - knee).max(0.0) / (1.0 - knee)).powi(2);
                1.0 - 0.25 * x - 0.75 * late
            })
            .collect(),
    };
    TimeSeries::new(t, values)
}

fn rescale_unit(raw: &[f64]) -> Vec<f64> {
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    raw.iter().map(|v| (v - lo) / (hi - lo)).collect()
}
