use std::fmt;

use crate::density::Bandwidths;

/// Why the cascade stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// The score failed to beat the best for `stop_patience` stages in a row.
    Patience,
    /// All `k_max` stages ran.
    KMax,
    /// A fixed or randomly drawn depth was requested.
    FixedDepth,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::Patience => "patience",
            StopReason::KMax => "k_max",
            StopReason::FixedDepth => "fixed_depth",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sharpness/smoothness score of one stage output.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParetoScore {
    /// Largest absolute second derivative.
    pub sharpness: f64,
    /// Population standard deviation of the second derivative.
    pub smoothness: f64,
    pub score: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StageRecord {
    pub k: usize,
    pub bandwidths: Bandwidths,
    pub pareto: ParetoScore,
}

/// One record per executed stage plus the stage that was returned.
#[derive(Clone, Debug, PartialEq)]
pub struct CascadeTrace {
    pub stages: Vec<StageRecord>,
    /// 1-based stage whose output was returned.
    pub selected: usize,
    pub stop: StopReason,
}

impl CascadeTrace {
    pub const HEADER: &'static str = "k,h_t,h_y,sharpness,smoothness,score,selected";

    pub fn selected_record(&self) -> Option<&StageRecord> {
        self.stages.iter().find(|r| r.k == self.selected)
    }

    /// Text rendering: a CSV header, one row per stage, and a trailing
    /// `# selected=.. stop=..` line.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CascadeTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", Self::HEADER)?;
        for r in &self.stages {
            writeln!(
                f,
                "{},{},{},{},{},{},{}",
                r.k,
                r.bandwidths.h_t,
                r.bandwidths.h_y,
                r.pareto.sharpness,
                r.pareto.smoothness,
                r.pareto.score,
                u8::from(r.k == self.selected)
            )?;
        }
        writeln!(f, "# selected={} stop={}", self.selected, self.stop)
    }
}
