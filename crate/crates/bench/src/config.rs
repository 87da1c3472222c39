//! Flat `key = value` files with optional `[kind name]` section headers.
//!
//! Blank lines and lines starting with `#` or `;` are ignored.

use std::str::FromStr;

use cascade_kde::{BaselineKind, BaselineSpec, RestorationConfig};

use crate::error::{BenchError, BenchResult};

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// A `[kind name]` block and the entries below it.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub kind: String,
    pub name: Option<String>,
    pub line: usize,
    pub entries: Vec<Entry>,
}

/// Splits a config text into sections. Entries before the first header land
/// in a section with an empty kind.
pub fn parse_sections(text: &str) -> BenchResult<Vec<Section>> {
    let mut sections = vec![Section {
        kind: String::new(),
        name: None,
        line: 0,
        entries: Vec::new(),
    }];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') || s.starts_with(';') {
            continue;
        }
        if let Some(inner) = s.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| BenchError::usage(format!("line {line}: unterminated section header")))?;
            let mut parts = inner.split_whitespace();
            let kind = parts
                .next()
                .ok_or_else(|| BenchError::usage(format!("line {line}: empty section header")))?;
            let name = parts.next().map(str::to_string);
            if parts.next().is_some() {
                return Err(BenchError::usage(format!("line {line}: section ids cannot contain spaces")));
            }
            sections.push(Section {
                kind: kind.to_string(),
                name,
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| BenchError::usage(format!("line {line}: expected `key = value`")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(BenchError::usage(format!("line {line}: empty key")));
        }
        let current = sections.last_mut().expect("at least one section");
        if current.entries.iter().any(|e| e.key == key) {
            return Err(BenchError::usage(format!("line {line}: duplicate key `{key}`")));
        }
        current.entries.push(Entry {
            key: key.to_string(),
            value: value.trim().to_string(),
            line,
        });
    }
    if sections[0].entries.is_empty() {
        sections.remove(0);
    }
    Ok(sections)
}

/// Entries of a file that must not contain section headers.
pub fn parse_flat(text: &str) -> BenchResult<Vec<Entry>> {
    let mut sections = parse_sections(text)?;
    match sections.len() {
        0 => Ok(Vec::new()),
        1 if sections[0].kind.is_empty() => Ok(sections.remove(0).entries),
        _ => Err(BenchError::usage("flat config file cannot contain section headers")),
    }
}

pub fn parse_value<T: FromStr>(entry: &Entry) -> BenchResult<T> {
    entry.value.parse().map_err(|_| {
        BenchError::usage(format!(
            "line {}: invalid value `{}` for `{}`",
            entry.line, entry.value, entry.key
        ))
    })
}

pub fn parse_bool(entry: &Entry) -> BenchResult<bool> {
    match entry.value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(BenchError::usage(format!(
            "line {}: `{}` expects a boolean, got `{}`",
            entry.line, entry.key, entry.value
        ))),
    }
}

fn parse_option<T: FromStr>(entry: &Entry) -> BenchResult<Option<T>> {
    if entry.value.eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        parse_value(entry).map(Some)
    }
}

/// Sets one restoration key. Returns `false` for keys it does not know.
pub fn apply_restoration_key(config: &mut RestorationConfig, entry: &Entry) -> BenchResult<bool> {
    let v = &mut config.variants;
    match entry.key.as_str() {
        "bw0" => config.bw0 = parse_value(entry)?,
        "bw_step" => config.bw_step = parse_value(entry)?,
        "k_max" => config.k_max = parse_value(entry)?,
        "lambda" => config.lambda = parse_value(entry)?,
        "iqr_multiplier" => config.iqr_multiplier = parse_value(entry)?,
        "r_t_factor" => config.r_t_factor = parse_value(entry)?,
        "grid_min" => config.grid_min = parse_value(entry)?,
        "grid_max" => config.grid_max = parse_value(entry)?,
        "grid_size" => config.grid_size = parse_option(entry)?,
        "pad_max" => config.pad_max = parse_value(entry)?,
        "pad_divisor" => config.pad_divisor = parse_value(entry)?,
        "stop_patience" => config.stop_patience = parse_value(entry)?,
        "fixed_grid_lo" => config.fixed_grid_bounds.0 = parse_value(entry)?,
        "fixed_grid_hi" => config.fixed_grid_bounds.1 = parse_value(entry)?,
        "parallel" => config.parallel = parse_bool(entry)?,
        "no_truncation" => v.no_truncation = parse_bool(entry)?,
        "no_padding" => v.no_padding = parse_bool(entry)?,
        "fixed_grid" => v.fixed_grid = parse_bool(entry)?,
        "fixed_bandwidth" => v.fixed_bandwidth = parse_bool(entry)?,
        "fixed_k" => v.fixed_k = parse_option(entry)?,
        "random_k" => v.random_k = parse_option(entry)?,
        "one_dimensional" => v.one_dimensional = parse_bool(entry)?,
        "rule_of_thumb_bandwidth" => v.rule_of_thumb_bandwidth = parse_bool(entry)?,
        _ => return Ok(false),
    }
    Ok(true)
}

/// Every restoration key with its current value, in a fixed order.
pub fn restoration_to_kv(config: &RestorationConfig) -> Vec<(&'static str, String)> {
    let opt = |o: Option<String>| o.unwrap_or_else(|| "none".to_string());
    let v = &config.variants;
    vec![
        ("bw0", config.bw0.to_string()),
        ("bw_step", config.bw_step.to_string()),
        ("k_max", config.k_max.to_string()),
        ("lambda", config.lambda.to_string()),
        ("iqr_multiplier", config.iqr_multiplier.to_string()),
        ("r_t_factor", config.r_t_factor.to_string()),
        ("grid_min", config.grid_min.to_string()),
        ("grid_max", config.grid_max.to_string()),
        ("grid_size", opt(config.grid_size.map(|m| m.to_string()))),
        ("pad_max", config.pad_max.to_string()),
        ("pad_divisor", config.pad_divisor.to_string()),
        ("stop_patience", config.stop_patience.to_string()),
        ("fixed_grid_lo", config.fixed_grid_bounds.0.to_string()),
        ("fixed_grid_hi", config.fixed_grid_bounds.1.to_string()),
        ("parallel", config.parallel.to_string()),
        ("no_truncation", v.no_truncation.to_string()),
        ("no_padding", v.no_padding.to_string()),
        ("fixed_grid", v.fixed_grid.to_string()),
        ("fixed_bandwidth", v.fixed_bandwidth.to_string()),
        ("fixed_k", opt(v.fixed_k.map(|k| k.to_string()))),
        ("random_k", opt(v.random_k.map(|s| s.to_string()))),
        ("one_dimensional", v.one_dimensional.to_string()),
        ("rule_of_thumb_bandwidth", v.rule_of_thumb_bandwidth.to_string()),
    ]
}

/// Builds and validates a restoration config from entries.
pub fn restoration_from_entries(entries: &[Entry]) -> BenchResult<RestorationConfig> {
    let mut config = RestorationConfig::default();
    for e in entries {
        if !apply_restoration_key(&mut config, e)? {
            return Err(BenchError::usage(format!("line {}: unknown key `{}`", e.line, e.key)));
        }
    }
    config.validate()?;
    Ok(config)
}

/// Sets one baseline key. Returns `false` for keys it does not know.
pub fn apply_baseline_key(spec: &mut BaselineSpec, entry: &Entry) -> BenchResult<bool> {
    match entry.key.as_str() {
        "baseline" => spec.kind = BaselineKind::from_str(&entry.value)?,
        "window" => spec.window = parse_value(entry)?,
        "polyorder" => spec.polyorder = parse_value(entry)?,
        "sigma" => spec.sigma = parse_value(entry)?,
        "trim" => spec.trim = parse_value(entry)?,
        "hampel_threshold" => spec.hampel_threshold = parse_value(entry)?,
        "bandwidth" => spec.bandwidth = parse_value(entry)?,
        _ => return Ok(false),
    }
    Ok(true)
}

pub fn baseline_to_kv(spec: &BaselineSpec) -> Vec<(&'static str, String)> {
    vec![
        ("baseline", spec.kind.name().to_string()),
        ("window", spec.window.to_string()),
        ("polyorder", spec.polyorder.to_string()),
        ("sigma", spec.sigma.to_string()),
        ("trim", spec.trim.to_string()),
        ("hampel_threshold", spec.hampel_threshold.to_string()),
        ("bandwidth", spec.bandwidth.to_string()),
    ]
}

/// Renders pairs as `key = value` lines.
pub fn render_kv(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

/// Parses a `key=value` command-line override.
pub fn entry_from_arg(arg: &str) -> BenchResult<Entry> {
    let (key, value) = arg
        .split_once('=')
        .ok_or_else(|| BenchError::usage(format!("override `{arg}` is not `key=value`")))?;
    Ok(Entry {
        key: key.trim().to_string(),
        value: value.trim().to_string(),
        line: 0,
    })
}
