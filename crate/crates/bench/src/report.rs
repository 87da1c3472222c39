//! CSV output for result, aggregate, summary and scaling tables.

use std::io::Write;

use crate::error::{BenchError, BenchResult};
use crate::run::{AggregateRow, MethodSummary, ResultRow, ScalingRow, Stat, METRIC_COLUMNS};

pub fn result_header() -> Vec<String> {
    let mut h: Vec<String> = ["dataset", "noise", "method", "seed"].map(String::from).to_vec();
    h.extend(METRIC_COLUMNS.iter().map(|c| c.to_string()));
    h
}

fn stat_header(prefix: &[&str]) -> Vec<String> {
    let mut h: Vec<String> = prefix.iter().map(|s| s.to_string()).collect();
    for c in METRIC_COLUMNS {
        h.push(format!("{c}_mean"));
        h.push(format!("{c}_std"));
    }
    h
}

pub fn aggregate_header() -> Vec<String> {
    stat_header(&["dataset", "noise", "method", "n"])
}

pub fn summary_header() -> Vec<String> {
    stat_header(&["method", "label", "n"])
}

fn csv_err(e: csv::Error) -> BenchError {
    BenchError::data(format!("CSV write failed: {e}"))
}

fn write_table<W: Write>(out: W, header: Vec<String>, records: Vec<Vec<String>>) -> BenchResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(&header).map_err(csv_err)?;
    for r in records {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn push_stats(record: &mut Vec<String>, stats: &[Stat]) {
    for s in stats {
        record.push(s.mean.to_string());
        record.push(s.std.to_string());
    }
}

pub fn write_results<W: Write>(out: W, rows: &[ResultRow]) -> BenchResult<()> {
    let records = rows
        .iter()
        .map(|r| {
            let mut rec = vec![r.dataset.clone(), r.noise.clone(), r.method.clone(), r.seed.to_string()];
            rec.extend(r.metric_values().iter().map(f64::to_string));
            rec
        })
        .collect();
    write_table(out, result_header(), records)
}

pub fn write_aggregates<W: Write>(out: W, rows: &[AggregateRow]) -> BenchResult<()> {
    let records = rows
        .iter()
        .map(|a| {
            let mut rec = vec![a.dataset.clone(), a.noise.clone(), a.method.clone(), a.count.to_string()];
            push_stats(&mut rec, &a.stats);
            rec
        })
        .collect();
    write_table(out, aggregate_header(), records)
}

pub fn write_summary<W: Write>(out: W, rows: &[MethodSummary]) -> BenchResult<()> {
    let records = rows
        .iter()
        .map(|s| {
            let mut rec = vec![s.method.clone(), s.label.clone(), s.count.to_string()];
            push_stats(&mut rec, &s.stats);
            rec
        })
        .collect();
    write_table(out, summary_header(), records)
}

pub fn write_scaling<W: Write>(out: W, rows: &[ScalingRow]) -> BenchResult<()> {
    let records = rows
        .iter()
        .map(|r| vec![r.length.to_string(), r.wall_time_ms.to_string()])
        .collect();
    write_table(out, vec!["length".into(), "wall_time_ms".into()], records)
}
