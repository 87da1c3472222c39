use crate::density::{bandwidth_schedule, rule_of_thumb_bandwidths, BandwidthSchedule, Bandwidths};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// How many cascade stages run and which output is returned.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Depth {
    /// Score every stage, keep the best, stop on patience or `k_max`.
    Adaptive,
    /// Run exactly this many stages and return the last.
    Fixed(usize),
    /// Draw the depth uniformly from `1..=k_max` with this seed.
    Random(u64),
}

/// Ablation switches. All off is the full method.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Variants {
    /// Integrate over the whole unit amplitude range instead of the local
    /// quartile support.
    pub no_truncation: bool,
    /// Skip reflection padding before density estimation.
    pub no_padding: bool,
    /// Integrate over the fixed grid [`RestorationConfig::fixed_grid_bounds`].
    /// Takes precedence over `no_truncation`.
    pub fixed_grid: bool,
    /// Keep `bw0` at every stage.
    pub fixed_bandwidth: bool,
    pub fixed_k: Option<usize>,
    pub random_k: Option<u64>,
    /// Replace the 2D density pipeline with 1D kernel regression in time.
    pub one_dimensional: bool,
    /// Experimental: per-axis rule-of-thumb bandwidths estimated from each
    /// stage input instead of the schedule.
    pub rule_of_thumb_bandwidth: bool,
}

/// Cascade hyperparameters. Defaults follow the reference parameter table.
#[derive(Clone, Debug, PartialEq)]
pub struct RestorationConfig {
    pub bw0: f64,
    pub bw_step: f64,
    pub k_max: usize,
    /// Weight of the smoothness term in the stopping score.
    pub lambda: f64,
    pub iqr_multiplier: f64,
    /// Local window radius in units of the temporal bandwidth.
    pub r_t_factor: f64,
    /// Integration grid size is `clamp(n, grid_min, grid_max)`.
    pub grid_min: usize,
    pub grid_max: usize,
    /// Overrides the grid rule when set.
    pub grid_size: Option<usize>,
    /// Padding is `min(pad_max, n / pad_divisor)`.
    pub pad_max: usize,
    pub pad_divisor: usize,
    pub stop_patience: usize,
    pub fixed_grid_bounds: (f64, f64),
    pub variants: Variants,
    /// Evaluate timestamps of a stage on the rayon pool. Output is identical
    /// either way.
    pub parallel: bool,
}

impl Default for RestorationConfig {
    fn default() -> Self {
        Self {
            bw0: 0.02,
            bw_step: 0.01,
            k_max: 5,
            lambda: 1.0,
            iqr_multiplier: 1.5,
            r_t_factor: 3.0,
            grid_min: 100,
            grid_max: 300,
            grid_size: None,
            pad_max: 30,
            pad_divisor: 4,
            stop_patience: 2,
            fixed_grid_bounds: (-0.2, 1.2),
            variants: Variants::default(),
            parallel: false,
        }
    }
}

impl RestorationConfig {
    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("bw0", self.bw0),
            ("bw_step", self.bw_step),
            ("lambda", self.lambda),
            ("iqr_multiplier", self.iqr_multiplier),
            ("r_t_factor", self.r_t_factor),
            ("fixed_grid_bounds.0", self.fixed_grid_bounds.0),
            ("fixed_grid_bounds.1", self.fixed_grid_bounds.1),
        ];
        if let Some((name, _)) = reals.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::config(format!("{name} must be finite")));
        }
        if self.bw0 <= 0.0 {
            return Err(Error::config("bw0 must be positive"));
        }
        if self.bw_step < 0.0 {
            return Err(Error::config("bw_step must be non-negative"));
        }
        if self.k_max == 0 {
            return Err(Error::config("k_max must be at least 1"));
        }
        if self.lambda < 0.0 {
            return Err(Error::config("lambda must be non-negative"));
        }
        if self.iqr_multiplier < 0.0 {
            return Err(Error::config("iqr_multiplier must be non-negative"));
        }
        if self.r_t_factor <= 0.0 {
            return Err(Error::config("r_t_factor must be positive"));
        }
        if self.grid_min < 2 || self.grid_max < self.grid_min {
            return Err(Error::config("grid bounds need 2 <= grid_min <= grid_max"));
        }
        if matches!(self.grid_size, Some(m) if m < 2) {
            return Err(Error::config("grid_size must be at least 2"));
        }
        if self.pad_divisor == 0 {
            return Err(Error::config("pad_divisor must be positive"));
        }
        if self.stop_patience == 0 {
            return Err(Error::config("stop_patience must be at least 1"));
        }
        if self.fixed_grid_bounds.0 >= self.fixed_grid_bounds.1 {
            return Err(Error::config("fixed grid bounds must be increasing"));
        }
        if let Some(k) = self.variants.fixed_k {
            if k == 0 || k > self.k_max {
                return Err(Error::config(format!("fixed_k = {k} outside 1..={}", self.k_max)));
            }
        }
        if self.variants.fixed_k.is_some() && self.variants.random_k.is_some() {
            return Err(Error::config("fixed_k and random_k are mutually exclusive"));
        }
        Ok(())
    }

    pub fn depth(&self) -> Depth {
        match (self.variants.fixed_k, self.variants.random_k) {
            (Some(k), _) => Depth::Fixed(k),
            (None, Some(seed)) => Depth::Random(seed),
            (None, None) => Depth::Adaptive,
        }
    }

    pub fn schedule(&self) -> BandwidthSchedule {
        BandwidthSchedule {
            bw0: self.bw0,
            bw_step: self.bw_step,
            fixed: self.variants.fixed_bandwidth,
        }
    }

    /// Bandwidths for stage `k` given that stage's (normalized) input.
    pub fn stage_bandwidths(&self, k: usize, input: &TimeSeries) -> Result<Bandwidths> {
        if self.variants.rule_of_thumb_bandwidth {
            if k == 0 {
                return Err(Error::invalid("cascade stages are numbered from 1"));
            }
            rule_of_thumb_bandwidths(input)
        } else {
            bandwidth_schedule(k, &self.schedule())
        }
    }

    /// Number of amplitude grid nodes for a series of length `n`.
    pub fn grid_nodes(&self, n: usize) -> usize {
        self.grid_size
            .unwrap_or_else(|| n.clamp(self.grid_min, self.grid_max))
    }

    /// Reflection padding width for a series of length `n`; 0 disables.
    pub fn padding(&self, n: usize) -> usize {
        if self.variants.no_padding {
            0
        } else {
            self.pad_max.min(n / self.pad_divisor).min(n.saturating_sub(1))
        }
    }
}
