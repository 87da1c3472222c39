//! Benchmark plans: datasets x corruptions x methods x seeds.
//!
//! ```text
//! [plan]
//! seeds = 1, 2, 3, 4, 5
//!
//! [dataset peaks]
//! signal = multi_peak
//! length = 500
//!
//! [corruption mixed]
//! kind = mixed
//! sigma = 0.1
//!
//! [method cascade]
//! type = cascade
//!
//! [method median]
//! type = baseline
//! baseline = median_filter
//! window = 11
//! ```

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cascade_kde::corruption::{CorruptionKind, CorruptionSpec, SignalKind, SyntheticSignalSpec};
use cascade_kde::metrics::{DEFAULT_PEAK_TOLERANCE, DEFAULT_PROMINENCE};
use cascade_kde::{apply_baseline, restore, BaselineSpec, RestorationConfig, TimeSeries};

use crate::config::{
    apply_baseline_key, apply_restoration_key, parse_bool, parse_sections, parse_value, Entry, Section,
};
use crate::error::{BenchError, BenchResult};

pub const DEFAULT_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

#[derive(Clone, Debug, PartialEq)]
pub enum DatasetSource {
    Synthetic(SyntheticSignalSpec),
    Csv(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetSpec {
    pub id: String,
    pub source: DatasetSource,
}

impl DatasetSpec {
    /// Clean ground-truth series for this dataset.
    pub fn load(&self) -> BenchResult<TimeSeries> {
        match &self.source {
            DatasetSource::Synthetic(spec) => Ok(cascade_kde::generate_clean(spec)?),
            DatasetSource::Csv(path) => cascade_kde::io::read_series_file(path)
                .map_err(|e| BenchError::data(format!("{}: {e}", path.display()))),
        }
    }
}

/// Corruption template; the seed is filled in per run.
#[derive(Clone, Debug, PartialEq)]
pub struct CorruptionEntry {
    pub id: String,
    pub spec: CorruptionSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    Cascade(RestorationConfig),
    Baseline(BaselineSpec),
}

impl Method {
    pub fn run(&self, series: &TimeSeries) -> cascade_kde::Result<TimeSeries> {
        match self {
            Method::Cascade(config) => restore(series, config).map(|(s, _)| s),
            Method::Baseline(spec) => apply_baseline(series, spec),
        }
    }

    pub fn validate(&self) -> cascade_kde::Result<()> {
        match self {
            Method::Cascade(config) => config.validate(),
            Method::Baseline(spec) => spec.validate(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodSpec {
    pub id: String,
    /// Display name for summaries; defaults to the id.
    pub label: String,
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkPlan {
    pub datasets: Vec<DatasetSpec>,
    pub corruptions: Vec<CorruptionEntry>,
    pub methods: Vec<MethodSpec>,
    pub seeds: Vec<u64>,
    pub output: Option<PathBuf>,
    pub prominence: f64,
    pub peak_tolerance: usize,
    /// Worker threads for independent runs; 0 uses every core.
    pub jobs: usize,
}

impl BenchmarkPlan {
    pub fn new(
        datasets: Vec<DatasetSpec>,
        corruptions: Vec<CorruptionEntry>,
        methods: Vec<MethodSpec>,
    ) -> Self {
        Self {
            datasets,
            corruptions,
            methods,
            seeds: DEFAULT_SEEDS.to_vec(),
            output: None,
            prominence: DEFAULT_PROMINENCE,
            peak_tolerance: DEFAULT_PEAK_TOLERANCE,
            jobs: 1,
        }
    }

    /// Number of result rows a run produces.
    pub fn cardinality(&self) -> usize {
        self.datasets.len() * self.corruptions.len() * self.methods.len() * self.seeds.len()
    }

    pub fn validate(&self) -> BenchResult<()> {
        let nonempty = [
            ("dataset", self.datasets.is_empty()),
            ("corruption", self.corruptions.is_empty()),
            ("method", self.methods.is_empty()),
            ("seed", self.seeds.is_empty()),
        ];
        if let Some((what, _)) = nonempty.iter().find(|(_, empty)| *empty) {
            return Err(BenchError::usage(format!("plan needs at least one {what}")));
        }
        let mut seen = HashSet::new();
        if let Some(s) = self.seeds.iter().find(|s| !seen.insert(**s)) {
            return Err(BenchError::usage(format!("seed {s} listed twice")));
        }
        check_unique_ids("dataset", self.datasets.iter().map(|d| d.id.as_str()))?;
        check_unique_ids("corruption", self.corruptions.iter().map(|c| c.id.as_str()))?;
        check_unique_ids("method", self.methods.iter().map(|m| m.id.as_str()))?;
        for d in &self.datasets {
            if let DatasetSource::Synthetic(spec) = &d.source {
                spec.validate()
                    .map_err(|e| BenchError::usage(format!("dataset `{}`: {e}", d.id)))?;
            }
        }
        for c in &self.corruptions {
            c.spec
                .validate()
                .map_err(|e| BenchError::usage(format!("corruption `{}`: {e}", c.id)))?;
        }
        for m in &self.methods {
            m.method
                .validate()
                .map_err(|e| BenchError::usage(format!("method `{}`: {e}", m.id)))?;
        }
        if !(self.prominence.is_finite() && self.prominence >= 0.0) {
            return Err(BenchError::usage("prominence must be finite and non-negative"));
        }
        Ok(())
    }

    /// Parses a plan file. Relative CSV paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> BenchResult<Self> {
        let mut plan = BenchmarkPlan::new(Vec::new(), Vec::new(), Vec::new());
        for section in parse_sections(text)? {
            match section.kind.as_str() {
                "plan" => parse_plan_section(&mut plan, &section, base_dir)?,
                "dataset" => plan.datasets.push(parse_dataset(&section, base_dir)?),
                "corruption" => plan.corruptions.push(parse_corruption(&section)?),
                "method" => plan.methods.push(parse_method(&section)?),
                "" => {
                    return Err(BenchError::usage(format!(
                        "line {}: entries must follow a section header",
                        section.entries[0].line
                    )))
                }
                other => {
                    return Err(BenchError::usage(format!(
                        "line {}: unknown section `{other}`",
                        section.line
                    )))
                }
            }
        }
        plan.validate()?;
        Ok(plan)
    }

    pub fn from_file(path: &Path) -> BenchResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::data(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

fn check_unique_ids<'a>(what: &str, ids: impl Iterator<Item = &'a str>) -> BenchResult<()> {
    let mut seen = HashSet::new();
    for id in ids {
        if id.contains(',') || id.contains('"') {
            return Err(BenchError::usage(format!("{what} id `{id}` cannot contain commas or quotes")));
        }
        if !seen.insert(id) {
            return Err(BenchError::usage(format!("{what} id `{id}` used twice")));
        }
    }
    Ok(())
}

fn section_id(section: &Section) -> BenchResult<String> {
    section.name.clone().ok_or_else(|| {
        BenchError::usage(format!(
            "line {}: `[{}]` needs an id, as in `[{} name]`",
            section.line, section.kind, section.kind
        ))
    })
}

fn unknown_key(entry: &Entry, section: &str) -> BenchError {
    BenchError::usage(format!("line {}: unknown key `{}` in [{section}]", entry.line, entry.key))
}

fn parse_plan_section(plan: &mut BenchmarkPlan, section: &Section, base_dir: &Path) -> BenchResult<()> {
    for e in &section.entries {
        match e.key.as_str() {
            "seeds" => {
                plan.seeds = e
                    .value
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse()
                            .map_err(|_| BenchError::usage(format!("line {}: bad seed `{}`", e.line, s.trim())))
                    })
                    .collect::<BenchResult<_>>()?
            }
            "output" => plan.output = Some(base_dir.join(&e.value)),
            "prominence" => plan.prominence = parse_value(e)?,
            "peak_tolerance" => plan.peak_tolerance = parse_value(e)?,
            "jobs" => plan.jobs = parse_value(e)?,
            _ => return Err(unknown_key(e, "plan")),
        }
    }
    Ok(())
}

fn parse_dataset(section: &Section, base_dir: &Path) -> BenchResult<DatasetSpec> {
    let id = section_id(section)?;
    let mut signal: Option<SignalKind> = None;
    let mut length = 500usize;
    let mut path = None;
    let mut params: Vec<&Entry> = Vec::new();
    for e in &section.entries {
        match e.key.as_str() {
            "signal" => signal = Some(SignalKind::from_name(&e.value).map_err(BenchError::from_usage)?),
            "length" => length = parse_value(e)?,
            "path" => path = Some(base_dir.join(&e.value)),
            "frequency" | "peaks" | "decay" | "knee" => params.push(e),
            _ => return Err(unknown_key(e, "dataset")),
        }
    }
    let source = match (signal, path) {
        (Some(mut kind), None) => {
            for e in params {
                match (&mut kind, e.key.as_str()) {
                    (SignalKind::Sine { frequency }, "frequency")
                    | (SignalKind::DampedOscillation { frequency, .. }, "frequency") => *frequency = parse_value(e)?,
                    (SignalKind::MultiPeak { peaks }, "peaks") => *peaks = parse_value(e)?,
                    (SignalKind::DampedOscillation { decay, .. }, "decay") => *decay = parse_value(e)?,
                    (SignalKind::DegradationCurve { knee }, "knee") => *knee = parse_value(e)?,
                    _ => {
                        return Err(BenchError::usage(format!(
                            "line {}: `{}` does not apply to {}",
                            e.line,
                            e.key,
                            kind.name()
                        )))
                    }
                }
            }
            DatasetSource::Synthetic(SyntheticSignalSpec::new(kind, length))
        }
        (None, Some(p)) if params.is_empty() => DatasetSource::Csv(p),
        (None, Some(_)) => {
            return Err(BenchError::usage(format!(
                "dataset `{id}`: signal parameters need `signal`"
            )))
        }
        _ => {
            return Err(BenchError::usage(format!(
                "dataset `{id}` needs exactly one of `signal` or `path`"
            )))
        }
    };
    Ok(DatasetSpec { id, source })
}

fn parse_corruption(section: &Section) -> BenchResult<CorruptionEntry> {
    let id = section_id(section)?;
    let mut spec = CorruptionSpec::default();
    for e in &section.entries {
        match e.key.as_str() {
            "kind" => spec.kind = CorruptionKind::from_str(&e.value).map_err(BenchError::from_usage)?,
            "sigma" => spec.sigma = parse_value(e)?,
            "ratio" => spec.ratio = parse_value(e)?,
            "amplitude" => spec.amplitude = parse_value(e)?,
            "clip_impulses" => spec.clip_impulses = parse_bool(e)?,
            _ => return Err(unknown_key(e, "corruption")),
        }
    }
    Ok(CorruptionEntry { id, spec })
}

fn parse_method(section: &Section) -> BenchResult<MethodSpec> {
    let id = section_id(section)?;
    let mut label = None;
    let mut kind = None;
    let mut rest = Vec::new();
    for e in &section.entries {
        match e.key.as_str() {
            "type" => kind = Some(e.value.clone()),
            "label" => label = Some(e.value.clone()),
            _ => rest.push(e),
        }
    }
    let method = match kind.as_deref() {
        Some("cascade") => {
            let mut config = RestorationConfig::default();
            for e in rest {
                if !apply_restoration_key(&mut config, e)? {
                    return Err(unknown_key(e, "method"));
                }
            }
            Method::Cascade(config)
        }
        Some("baseline") => {
            if !rest.iter().any(|e| e.key == "baseline") {
                return Err(BenchError::usage(format!("method `{id}` needs `baseline = <name>`")));
            }
            let mut spec = BaselineSpec::new(cascade_kde::BaselineKind::MovingAverage);
            for e in rest {
                if !apply_baseline_key(&mut spec, e)? {
                    return Err(unknown_key(e, "method"));
                }
            }
            Method::Baseline(spec)
        }
        Some(other) => {
            return Err(BenchError::usage(format!(
                "method `{id}`: type must be `cascade` or `baseline`, got `{other}`"
            )))
        }
        None => return Err(BenchError::usage(format!("method `{id}` needs `type`"))),
    };
    Ok(MethodSpec {
        label: label.unwrap_or_else(|| id.clone()),
        id,
        method,
    })
}

impl BenchError {
    fn from_usage(e: cascade_kde::Error) -> Self {
        BenchError::Usage(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cascade_kde::BaselineKind;

    const PLAN: &str = "\
[plan]
seeds = 3, 4
prominence = 0.1

[dataset peaks]
signal = multi_peak
length = 128
peaks = 4

[dataset file]
path = data/x.csv

[corruption mixed]
kind = mixed
amplitude = 0.4

[method full]
type = cascade
label = Full
k_max = 3

[method median]
type = baseline
baseline = median_filter
window = 7
";

    #[test]
    fn parses_every_section() {
        let plan = BenchmarkPlan::parse(PLAN, Path::new("/plans")).unwrap();
        assert_eq!(plan.seeds, vec![3, 4]);
        assert_eq!(plan.prominence, 0.1);
        assert_eq!(
            plan.datasets[0].source,
            DatasetSource::Synthetic(SyntheticSignalSpec::new(SignalKind::MultiPeak { peaks: 4 }, 128))
        );
        assert_eq!(plan.datasets[1].source, DatasetSource::Csv(PathBuf::from("/plans/data/x.csv")));
        assert_eq!(plan.corruptions[0].spec.amplitude, 0.4);
        assert_eq!(plan.methods[0].label, "Full");
        assert!(matches!(&plan.methods[0].method, Method::Cascade(c) if c.k_max == 3));
        assert!(matches!(
            &plan.methods[1].method,
            Method::Baseline(b) if b.kind == BaselineKind::MedianFilter && b.window == 7
        ));
        assert_eq!(plan.methods[1].label, "median");
        assert_eq!(plan.cardinality(), 2 * 1 * 2 * 2);
    }

    #[test]
    fn rejects_invalid_plans() {
        let base = Path::new(".");
        let cases = [
            "[dataset a]\nsignal = sine\n[corruption c]\n[method m]\ntype = cascade\nk_max = 0\n",
            "[dataset a]\nsignal = sine\n[corruption c]\n",
            "[plan]\nseeds = 1, 1\n[dataset a]\nsignal = sine\n[corruption c]\n[method m]\ntype = cascade\n",
            "[dataset a]\nsignal = sine\npath = x.csv\n[corruption c]\n[method m]\ntype = cascade\n",
            "[dataset a]\nsignal = sine\npeaks = 3\n[corruption c]\n[method m]\ntype = cascade\n",
            "[dataset a]\nsignal = sine\n[corruption c]\n[method m]\ntype = baseline\n",
            "[dataset a]\nsignal = sine\n[corruption c]\n[method m]\ntype = cascade\nbogus = 1\n",
            "[dataset]\nsignal = sine\n",
            "[widget w]\n",
        ];
        for text in cases {
            let err = BenchmarkPlan::parse(text, base).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{text}: {err}");
        }
    }
}
