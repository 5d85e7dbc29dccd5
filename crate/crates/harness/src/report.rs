//! Summary tables: mean ± std of the final error per (label, population
//! size), the best population size per label, and U-test markers against a
//! baseline label.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use edamcc::stats::{mann_whitney_u, significance_marker, summarize};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::execute::RunRecord;

/// Magnitudes below this are reported as exactly zero.
pub const ZERO_THRESHOLD: f64 = 1e-12;

pub fn zero_rule(v: f64) -> f64 {
    if v.abs() < ZERO_THRESHOLD {
        0.0
    } else {
        v
    }
}

/// `mean ± std` in short scientific notation, zero rule applied.
pub fn format_cell(mean: f64, std_dev: f64) -> String {
    let f = |v: f64| {
        let v = zero_rule(v);
        if v == 0.0 {
            "0".to_owned()
        } else {
            format!("{v:.1e}")
        }
    };
    format!("{} ± {}", f(mean), f(std_dev))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryCell {
    pub label: String,
    pub problem: String,
    pub n: usize,
    pub pop_size: usize,
    pub completed: usize,
    pub failed: usize,
    /// Zero rule applied.
    pub mean: f64,
    /// Zero rule applied.
    pub std_dev: f64,
    pub best: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub label: String,
    pub baseline: String,
    pub pop_size: usize,
    pub baseline_pop_size: usize,
    pub u_statistic: f64,
    pub p_value: f64,
    pub marker: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpuRow {
    pub label: String,
    pub pop_size: usize,
    pub model_build: f64,
    pub sampling: f64,
    pub evaluation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub cells: Vec<SummaryCell>,
    pub comparisons: Vec<Comparison>,
    /// Mean seconds per run and phase.
    pub cpu: Vec<CpuRow>,
}

impl SummaryReport {
    pub fn best_cell(&self, label: &str) -> Option<&SummaryCell> {
        self.cells.iter().find(|c| c.label == label && c.best)
    }

    /// Plain-text table, one line per cell; the best size is starred and
    /// carries the comparison marker.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            let marker = self
                .comparisons
                .iter()
                .find(|k| c.best && k.label == c.label)
                .map_or("", |k| k.marker.as_str());
            let _ = writeln!(
                out,
                "{:<18} {} {:>3}D  M={:<5} {:<22}{}{}",
                c.label,
                c.problem,
                c.n,
                c.pop_size,
                format_cell(c.mean, c.std_dev),
                marker,
                if c.best { "  (best)" } else { "" },
            );
            if c.failed > 0 {
                let _ = writeln!(out, "{:<18} {} failed run(s)", "", c.failed);
            }
        }
        out
    }
}

fn errors_of<'a>(records: impl Iterator<Item = &'a RunRecord>) -> Vec<f64> {
    records.filter_map(RunRecord::final_error).collect()
}

/// Builds the report. Markers compare each label's best cell against the
/// baseline's best cell; no markers when `baseline` is `None`.
pub fn report(records: &[RunRecord], baseline: Option<&str>) -> Result<SummaryReport> {
    if records.is_empty() {
        return Err(HarnessError::EmptyRecords);
    }
    let mut groups: BTreeMap<(&str, usize), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.label.as_str(), r.pop_size)).or_default().push(r);
    }

    let mut cells = Vec::new();
    let mut cpu = Vec::new();
    for ((label, pop_size), group) in &groups {
        let errs = errors_of(group.iter().copied());
        let (mean, std_dev) = match summarize(&errs) {
            Ok(s) => (s.mean, s.std_dev),
            Err(_) => (f64::NAN, f64::NAN),
        };
        cells.push(SummaryCell {
            label: label.to_string(),
            problem: group[0].config.problem.to_string(),
            n: group[0].config.n,
            pop_size: *pop_size,
            completed: errs.len(),
            failed: group.len() - errs.len(),
            mean: zero_rule(mean),
            std_dev: zero_rule(std_dev),
            best: false,
        });
        let traces: Vec<_> = group.iter().filter_map(|r| r.trace()).collect();
        if !traces.is_empty() {
            let k = traces.len() as f64;
            cpu.push(CpuRow {
                label: label.to_string(),
                pop_size: *pop_size,
                model_build: traces.iter().map(|t| t.timings.model_build).sum::<f64>() / k,
                sampling: traces.iter().map(|t| t.timings.sampling).sum::<f64>() / k,
                evaluation: traces.iter().map(|t| t.timings.evaluation).sum::<f64>() / k,
            });
        }
    }

    // best = minimal mean, ties to the smaller size (cells are size-ordered)
    let labels: Vec<String> = {
        let mut l: Vec<String> = cells.iter().map(|c| c.label.clone()).collect();
        l.dedup();
        l
    };
    for label in &labels {
        let best = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| &c.label == label && !c.mean.is_nan())
            .fold(None::<(usize, f64)>, |acc, (i, c)| match acc {
                Some((_, m)) if m <= c.mean => acc,
                _ => Some((i, c.mean)),
            });
        if let Some((i, _)) = best {
            cells[i].best = true;
        }
    }

    let mut comparisons = Vec::new();
    if let Some(base) = baseline {
        let best_size = |label: &str| cells.iter().find(|c| c.label == label && c.best).map(|c| c.pop_size);
        if let Some(base_size) = best_size(base) {
            let base_errs = errors_of(groups[&(base, base_size)].iter().copied());
            for label in labels.iter().filter(|l| l.as_str() != base) {
                let Some(size) = best_size(label) else { continue };
                let errs = errors_of(groups[&(label.as_str(), size)].iter().copied());
                let u = mann_whitney_u(&errs, &base_errs)?;
                comparisons.push(Comparison {
                    label: label.clone(),
                    baseline: base.to_owned(),
                    pop_size: size,
                    baseline_pop_size: base_size,
                    u_statistic: u.u_statistic,
                    p_value: u.p_two_tailed,
                    marker: significance_marker(u.p_two_tailed).to_owned(),
                });
            }
        }
    }

    Ok(SummaryReport {
        cells,
        comparisons,
        cpu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use crate::execute::RunOutcome;
    use edamcc::engine::{PhaseTimings, RunTrace};
    use edamcc::population::Individual;

    fn record(label: &str, pop_size: usize, run: usize, err: f64) -> RunRecord {
        RunRecord {
            config: parse_config("problem=F1 n=10 algorithm=umda").unwrap(),
            label: label.to_owned(),
            pop_size,
            run,
            seed: run as u64,
            outcome: RunOutcome::Completed {
                final_error: err,
                trace: RunTrace {
                    generations: Vec::new(),
                    timings: PhaseTimings::default(),
                    best: Individual::evaluated(vec![0.0; 10], err),
                    seed: run as u64,
                },
            },
        }
    }

    #[test]
    fn tiny_values_report_as_zero() {
        let recs: Vec<_> = (0..5).map(|r| record("a", 200, r, 1e-15)).collect();
        let rep = report(&recs, None).unwrap();
        let c = &rep.cells[0];
        assert_eq!((c.mean, c.std_dev), (0.0, 0.0));
        assert_eq!(format_cell(c.mean, c.std_dev), "0 ± 0");
    }

    #[test]
    fn separated_samples_get_strongest_marker() {
        let mut recs: Vec<_> = (0..25).map(|r| record("base", 200, r, 100.0 + r as f64)).collect();
        recs.extend((0..25).map(|r| record("mcc", 200, r, 1.0 + r as f64 * 0.01)));
        let rep = report(&recs, Some("base")).unwrap();
        assert_eq!(rep.comparisons.len(), 1);
        assert_eq!(rep.comparisons[0].marker, "§");
    }

    #[test]
    fn single_record() {
        let rep = report(&[record("a", 200, 0, 3.5)], Some("a")).unwrap();
        assert_eq!(rep.cells[0].mean, 3.5);
        assert_eq!(rep.cells[0].std_dev, 0.0);
        assert!(rep.comparisons.is_empty());
    }

    #[test]
    fn best_size_ties_go_to_smaller() {
        let recs = vec![
            record("a", 1000, 0, 2.0),
            record("a", 200, 0, 2.0),
            record("a", 500, 0, 5.0),
        ];
        let rep = report(&recs, None).unwrap();
        assert_eq!(rep.best_cell("a").unwrap().pop_size, 200);
    }

    #[test]
    fn empty_is_rejected() {
        assert!(matches!(report(&[], None), Err(HarnessError::EmptyRecords)));
    }

    #[test]
    fn failures_are_counted() {
        let mut bad = record("a", 200, 1, 0.0);
        bad.outcome = RunOutcome::Failed {
            message: "boom".into(),
        };
        let rep = report(&[record("a", 200, 0, 1.0), bad], None).unwrap();
        assert_eq!((rep.cells[0].completed, rep.cells[0].failed), (1, 1));
        assert!(rep.to_text().contains("failed"));
    }
}
