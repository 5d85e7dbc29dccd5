//! CSV and JSON output. Floats are written as `{:.16e}` so they round-trip.

use std::fs;
use std::path::Path;

use edamcc::mcc::{record_structure, StructureTrace};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::execute::RunRecord;
use crate::report::SummaryReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportKind {
    Trace,
    QMatrix,
    Timing,
    Summary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub generation: usize,
    pub fes: u64,
    pub best_fitness: f64,
    pub n_strong: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub algorithm: String,
    pub pop_size: usize,
    pub run: usize,
    pub phase: String,
    pub seconds: f64,
}

pub fn trace_rows(record: &RunRecord) -> Vec<TraceRow> {
    record.trace().map_or_else(Vec::new, |t| {
        t.generations
            .iter()
            .map(|g| TraceRow {
                generation: g.generation,
                fes: g.fes,
                best_fitness: g.best_fitness,
                n_strong: g.n_strong(),
            })
            .collect()
    })
}

pub fn timing_rows(records: &[RunRecord]) -> Vec<TimingRow> {
    let mut rows = Vec::new();
    for r in records {
        let Some(t) = r.trace() else { continue };
        for (phase, seconds) in [
            ("model_build", t.timings.model_build),
            ("sampling", t.timings.sampling),
            ("evaluation", t.timings.evaluation),
        ] {
            rows.push(TimingRow {
                algorithm: r.label.clone(),
                pop_size: r.pop_size,
                run: r.run,
                phase: phase.to_owned(),
                seconds,
            });
        }
    }
    rows
}

/// Strong-set counts merged over all completed records. Column `g - 1` is
/// model-building generation `g`.
pub fn structure_trace(records: &[RunRecord]) -> Result<StructureTrace> {
    let n = records.first().ok_or(HarnessError::EmptyRecords)?.config.n;
    let mut total = StructureTrace::new(n);
    for r in records {
        if r.config.n != n {
            return Err(HarnessError::Incompatible(format!(
                "records mix dimensions {n} and {}",
                r.config.n
            )));
        }
        let Some(t) = r.trace() else { continue };
        let mut one = StructureTrace::new(n);
        for g in t.generations.iter().skip(1) {
            record_structure(g.strong.as_deref().unwrap_or(&[]), g.generation - 1, &mut one);
        }
        total.merge(&one);
    }
    Ok(total)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|source| HarnessError::Csv {
        path: path.to_owned(),
        source,
    })
}

fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let csv_err = |source| HarnessError::Csv {
        path: path.to_owned(),
        source,
    };
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(csv_err)?;
    }
    w.flush().map_err(HarnessError::io(path))
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|source| HarnessError::Json {
        path: path.to_owned(),
        source,
    })?;
    fs::write(path, text).map_err(HarnessError::io(path))
}

pub fn write_trace(record: &RunRecord, path: &Path, format: Format) -> Result<()> {
    let rows = trace_rows(record);
    match format {
        Format::Json => write_json(path, &rows),
        Format::Csv => write_csv(
            path,
            &["generation", "fes", "best_fitness", "n_strong"],
            rows.iter().map(|r| {
                [
                    r.generation.to_string(),
                    r.fes.to_string(),
                    fmt_float(r.best_fitness),
                    r.n_strong.map_or_else(String::new, |k| k.to_string()),
                ]
            }),
        ),
    }
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let csv_err = |source| HarnessError::Csv {
        path: path.to_owned(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().collect::<std::result::Result<Vec<TraceRow>, _>>().map_err(csv_err)
}

/// `n` rows, one per variable, and one column per model-building generation.
pub fn write_q_matrix(trace: &StructureTrace, path: &Path, format: Format) -> Result<()> {
    match format {
        Format::Json => write_json(path, &trace.q_matrix),
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .flexible(true)
                .from_path(path)
                .map_err(|source| HarnessError::Csv {
                    path: path.to_owned(),
                    source,
                })?;
            for row in &trace.q_matrix {
                w.write_record(row.iter().map(u32::to_string))
                    .map_err(|source| HarnessError::Csv {
                        path: path.to_owned(),
                        source,
                    })?;
            }
            w.flush().map_err(HarnessError::io(path))
        }
    }
}

/// Mean `|S|` per model-building generation over the merged runs.
pub fn write_strong_counts(trace: &StructureTrace, runs: usize, path: &Path, format: Format) -> Result<()> {
    let rows: Vec<(usize, f64)> = trace
        .strong_counts
        .iter()
        .enumerate()
        .map(|(g, &k)| (g + 1, k as f64 / runs.max(1) as f64))
        .collect();
    match format {
        Format::Json => write_json(path, &rows),
        Format::Csv => write_csv(
            path,
            &["generation", "mean_n_strong"],
            rows.iter().map(|&(g, v)| [g.to_string(), fmt_float(v)]),
        ),
    }
}

pub fn write_timing(records: &[RunRecord], path: &Path, format: Format) -> Result<()> {
    let rows = timing_rows(records);
    match format {
        Format::Json => write_json(path, &rows),
        Format::Csv => write_csv(
            path,
            &["algorithm", "pop_size", "run", "phase", "seconds"],
            rows.iter().map(|r| {
                [
                    r.algorithm.clone(),
                    r.pop_size.to_string(),
                    r.run.to_string(),
                    r.phase.clone(),
                    fmt_float(r.seconds),
                ]
            }),
        ),
    }
}

/// Summary cells plus marker columns. Timing is not included, so identical
/// inputs give identical bytes.
pub fn write_summary(report: &SummaryReport, path: &Path, format: Format) -> Result<()> {
    match format {
        Format::Json => write_json(
            path,
            &serde_json::json!({ "cells": report.cells, "comparisons": report.comparisons }),
        ),
        Format::Csv => write_csv(
            path,
            &[
                "algorithm", "problem", "n", "pop_size", "completed", "failed", "mean", "std", "best",
                "baseline", "p_value", "marker",
            ],
            report.cells.iter().map(|c| {
                let cmp = report
                    .comparisons
                    .iter()
                    .find(|k| c.best && k.label == c.label);
                [
                    c.label.clone(),
                    c.problem.clone(),
                    c.n.to_string(),
                    c.pop_size.to_string(),
                    c.completed.to_string(),
                    c.failed.to_string(),
                    fmt_float(c.mean),
                    fmt_float(c.std_dev),
                    c.best.to_string(),
                    cmp.map_or_else(String::new, |k| k.baseline.clone()),
                    cmp.map_or_else(String::new, |k| fmt_float(k.p_value)),
                    cmp.map_or_else(String::new, |k| k.marker.clone()),
                ]
            }),
        ),
    }
}

/// Writes one kind of output for `records`. `Trace` requires exactly one record.
pub fn export(records: &[RunRecord], kind: ExportKind, path: &Path, format: Format) -> Result<()> {
    match kind {
        ExportKind::Trace => match records {
            [one] => write_trace(one, path, format),
            _ => Err(HarnessError::Incompatible(format!(
                "a trace export takes one record, got {}",
                records.len()
            ))),
        },
        ExportKind::QMatrix => write_q_matrix(&structure_trace(records)?, path, format),
        ExportKind::Timing => write_timing(records, path, format),
        ExportKind::Summary => write_summary(&crate::report::report(records, None)?, path, format),
    }
}
