//! Training-free time-series restoration.
//!
//! The core method estimates a Gaussian kernel density over the
//! (time, amplitude) plane, takes the conditional mean of the amplitude over
//! a robust quartile-fenced interval at every timestamp, and repeats this
//! with growing bandwidths while a sharpness/smoothness score keeps
//! improving. Classical smoothers, corruption generators and metrics are
//! included for benchmarking.
//!
//! ```
//! use cascade_kde::{restore, RestorationConfig, TimeSeries};
//!
//! let y: Vec<f64> = (0..100).map(|i| (i as f64 / 10.0).sin()).collect();
//! let series = TimeSeries::uniform(y).unwrap();
//! let (restored, trace) = restore(&series, &RestorationConfig::default()).unwrap();
//! assert_eq!(restored.len(), series.len());
//! assert!(trace.selected >= 1);
//! ```

pub mod baselines;
pub mod corruption;
pub mod density;
pub mod error;
pub mod io;
pub mod metrics;
pub mod restoration;
pub mod series;
pub mod stats;

pub use baselines::{apply_baseline, nw_regression, BaselineKind, BaselineSpec};
pub use corruption::{corrupt, generate_clean, CorruptionKind, CorruptionSpec, SignalKind, SyntheticSignalSpec};
pub use density::{bandwidth_schedule, BandwidthSchedule, Bandwidths, DensityField};
pub use error::{Error, Result};
pub use metrics::MetricsReport;
pub use restoration::{restore, CascadeTrace, RestorationConfig, Variants};
pub use series::{denormalize, finite_diff, normalize, reflect_pad, NormalizationParams, TimeSeries};
