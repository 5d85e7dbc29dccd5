//! The end-to-end commands: run, sweep, characterize, compare.

use std::fs;
use std::path::{Path, PathBuf};

use edamcc::mcc::StructureTrace;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::execute::{execute, load_records, ExecOptions, RunRecord, RECORDS_DIR};
use crate::export::{fmt_float, structure_trace, write_q_matrix, write_strong_counts, write_summary, write_timing, write_trace, Format};
use crate::report::{report, zero_rule, SummaryReport};

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(HarnessError::io(dir))
}

fn execute_into(config: &ExperimentConfig, jobs: Option<usize>) -> Result<Vec<RunRecord>> {
    execute(
        config,
        &ExecOptions {
            jobs,
            persist: Some(config.out.join(RECORDS_DIR)),
        },
    )
}

/// Executes the config, then writes per-run traces, timing and summary
/// under `config.out`.
pub fn run_experiment(config: &ExperimentConfig, jobs: Option<usize>, format: Format) -> Result<(Vec<RunRecord>, SummaryReport)> {
    let records = execute_into(config, jobs)?;
    let traces = config.out.join("traces");
    create_dir(&traces)?;
    for r in &records {
        let name = Path::new(&r.file_name()).with_extension(format.extension());
        write_trace(r, &traces.join(name), format)?;
    }
    write_outputs(&records, &config.out, None, format)
}

/// Writes timing and summary files for already loaded records.
pub fn write_outputs(
    records: &[RunRecord],
    out: &Path,
    baseline: Option<&str>,
    format: Format,
) -> Result<(Vec<RunRecord>, SummaryReport)> {
    create_dir(out)?;
    let rep = report(records, baseline)?;
    let ext = format.extension();
    write_timing(records, &out.join(format!("timing.{ext}")), format)?;
    write_summary(&rep, &out.join(format!("summary.{ext}")), format)?;
    Ok((records.to_vec(), rep))
}

/// Number of records that did not complete.
pub fn failures(records: &[RunRecord]) -> usize {
    records.iter().filter(|r| r.final_error().is_none()).count()
}

fn require_mcc(config: &ExperimentConfig, what: &str) -> Result<()> {
    if config.algorithm.is_mcc() {
        Ok(())
    } else {
        Err(HarnessError::invalid(
            "algorithm",
            format!("{what} needs an eda-mcc variant, got {}", config.algorithm),
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub theta: f64,
    pub c: usize,
    pub pop_size: usize,
    pub completed: usize,
    pub failed: usize,
    pub mean: f64,
    pub std_dev: f64,
}

/// Runs the full `theta x c` grid at the first configured population size.
/// Every grid point is validated before anything runs.
pub fn sweep(config: &ExperimentConfig, thetas: &[f64], cs: &[usize], jobs: Option<usize>, format: Format) -> Result<Vec<SweepCell>> {
    require_mcc(config, "sweep")?;
    if thetas.is_empty() || cs.is_empty() {
        return Err(HarnessError::invalid("theta", "sweep grids must not be empty"));
    }
    let pop_size = config.population_sizes[0];
    let mut points = Vec::new();
    for &theta in thetas {
        for &c in cs {
            let mut cfg = config.clone();
            cfg.theta = theta;
            cfg.c = c;
            cfg.population_sizes = vec![pop_size];
            cfg.out = config.out.join("sweep").join(format!("theta_{theta}_c_{c}"));
            cfg.validate()?;
            points.push(cfg);
        }
    }

    let mut cells = Vec::new();
    for cfg in &points {
        let records = execute_into(cfg, jobs)?;
        let rep = report(&records, None)?;
        let cell = &rep.cells[0];
        cells.push(SweepCell {
            theta: cfg.theta,
            c: cfg.c,
            pop_size,
            completed: cell.completed,
            failed: cell.failed,
            mean: cell.mean,
            std_dev: cell.std_dev,
        });
    }
    create_dir(&config.out)?;
    write_sweep(&cells, &config.out.join(format!("sweep.{}", format.extension())), format)?;
    Ok(cells)
}

pub fn write_sweep(cells: &[SweepCell], path: &Path, format: Format) -> Result<()> {
    match format {
        Format::Json => {
            let text = serde_json::to_string_pretty(cells).map_err(|source| HarnessError::Json {
                path: path.to_owned(),
                source,
            })?;
            fs::write(path, text).map_err(HarnessError::io(path))
        }
        Format::Csv => {
            let csv_err = |source| HarnessError::Csv {
                path: path.to_owned(),
                source,
            };
            let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
            w.write_record(["theta", "c", "pop_size", "completed", "failed", "mean", "std"])
                .map_err(csv_err)?;
            for k in cells {
                w.write_record([
                    k.theta.to_string(),
                    k.c.to_string(),
                    k.pop_size.to_string(),
                    k.completed.to_string(),
                    k.failed.to_string(),
                    fmt_float(zero_rule(k.mean)),
                    fmt_float(zero_rule(k.std_dev)),
                ])
                .map_err(csv_err)?;
            }
            w.flush().map_err(HarnessError::io(path))
        }
    }
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepCell>> {
    let csv_err = |source| HarnessError::Csv {
        path: path.to_owned(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.records()
        .map(|row| {
            let row = row.map_err(csv_err)?;
            let field = |i: usize, key: &str| -> Result<String> {
                row.get(i)
                    .map(str::to_owned)
                    .ok_or_else(|| HarnessError::Incompatible(format!("{}: missing column {key}", path.display())))
            };
            let num = |i: usize, key: &str| -> Result<f64> {
                field(i, key)?
                    .parse()
                    .map_err(|_| HarnessError::Incompatible(format!("{}: bad {key}", path.display())))
            };
            Ok(SweepCell {
                theta: num(0, "theta")?,
                c: num(1, "c")? as usize,
                pop_size: num(2, "pop_size")? as usize,
                completed: num(3, "completed")? as usize,
                failed: num(4, "failed")? as usize,
                mean: num(5, "mean")?,
                std_dev: num(6, "std")?,
            })
        })
        .collect()
}

/// Executes the config and writes the merged Q-matrix and mean `|S|` per
/// generation for each population size.
pub fn characterize(config: &ExperimentConfig, jobs: Option<usize>, format: Format) -> Result<Vec<(usize, StructureTrace)>> {
    require_mcc(config, "characterize")?;
    let records = execute_into(config, jobs)?;
    let ext = format.extension();
    let mut out = Vec::new();
    for &m in &config.population_sizes {
        let group: Vec<RunRecord> = records.iter().filter(|r| r.pop_size == m).cloned().collect();
        let trace = structure_trace(&group)?;
        let completed = group.iter().filter(|r| r.trace().is_some()).count();
        write_q_matrix(&trace, &config.out.join(format!("q_matrix_M{m}.{ext}")), format)?;
        write_strong_counts(&trace, completed, &config.out.join(format!("strong_M{m}.{ext}")), format)?;
        out.push((m, trace));
    }
    Ok(out)
}

/// Loads records from two result directories and reports the second
/// against the first as baseline. Labels are prefixed with the directory
/// name when both sides share one.
pub fn compare(dir_a: &Path, dir_b: &Path, out: Option<&PathBuf>, format: Format) -> Result<SummaryReport> {
    let load = |d: &Path| load_records(&d.join(RECORDS_DIR));
    let mut a = load(dir_a)?;
    let mut b = load(dir_b)?;
    if a.is_empty() || b.is_empty() {
        return Err(HarnessError::EmptyRecords);
    }
    let same = a.iter().any(|x| b.iter().any(|y| x.label == y.label));
    if same {
        let tag = |d: &Path| d.file_name().map_or_else(|| d.display().to_string(), |f| f.to_string_lossy().into_owned());
        let (ta, tb) = (tag(dir_a), tag(dir_b));
        if ta == tb {
            return Err(HarnessError::Incompatible("cannot tell the two result sets apart".into()));
        }
        a.iter_mut().for_each(|r| r.label = format!("{ta}:{}", r.label));
        b.iter_mut().for_each(|r| r.label = format!("{tb}:{}", r.label));
    }
    let baseline = a[0].label.clone();
    a.extend(b);
    match out {
        Some(dir) => Ok(write_outputs(&a, dir, Some(&baseline), format)?.1),
        None => report(&a, Some(&baseline)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn config(dir: &Path, extra: &str) -> ExperimentConfig {
        let mut c = parse_config(&format!(
            "problem=F2 n=6 algorithm=eda-mcc population_sizes=20 runs=2 budget_fes=300 c=3 m_corr=10 {extra}"
        ))
        .unwrap();
        c.out = dir.to_owned();
        c
    }

    #[test]
    fn sweep_counts_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(dir.path(), "");
        let cells = sweep(&cfg, &[0.2, 0.4], &[2, 3], Some(2), Format::Csv).unwrap();
        assert_eq!(cells.len(), 4);
        let runs: usize = cells.iter().map(|c| c.completed).sum();
        assert_eq!(runs, 8);
        let back = read_sweep_csv(&dir.path().join("sweep.csv")).unwrap();
        assert_eq!(back, cells);
    }

    #[test]
    fn sweep_rejects_bad_grid_before_running() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(dir.path(), "");
        let err = sweep(&cfg, &[0.2, 1.5], &[2], None, Format::Csv).unwrap_err();
        assert!(err.to_string().contains("theta"));
        assert!(!dir.path().join("sweep").exists());
        let err = sweep(&cfg, &[0.2], &[7], None, Format::Csv).unwrap_err();
        assert!(err.to_string().contains("`c`"));
    }

    #[test]
    fn summary_bytes_are_deterministic() {
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        run_experiment(&config(d1.path(), ""), Some(2), Format::Csv).unwrap();
        run_experiment(&config(d2.path(), ""), Some(1), Format::Csv).unwrap();
        let a = fs::read(d1.path().join("summary.csv")).unwrap();
        let b = fs::read(d2.path().join("summary.csv")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn characterize_bounds_q_entries() {
        let dir = tempfile::tempdir().unwrap();
        let traces = characterize(&config(dir.path(), "theta=0.1"), None, Format::Csv).unwrap();
        let (_, t) = &traces[0];
        assert_eq!(t.q_matrix.len(), 6);
        assert!(t.q_matrix.iter().flatten().all(|&q| q <= 2));
        assert!(dir.path().join("q_matrix_M20.csv").exists());
        assert!(dir.path().join("strong_M20.csv").exists());
    }

    #[test]
    fn characterize_needs_mcc() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(dir.path(), "");
        cfg.algorithm = crate::config::AlgorithmName::Umda;
        assert!(characterize(&cfg, None, Format::Csv).is_err());
    }

    #[test]
    fn compare_two_directories() {
        let root = tempfile::tempdir().unwrap();
        let (a, b) = (root.path().join("a"), root.path().join("b"));
        run_experiment(&config(&a, ""), None, Format::Csv).unwrap();
        let mut cb = config(&b, "");
        cb.algorithm = crate::config::AlgorithmName::Umda;
        run_experiment(&cb, None, Format::Csv).unwrap();
        let rep = compare(&a, &b, None, Format::Csv).unwrap();
        assert_eq!(rep.comparisons.len(), 1);
        assert_eq!(rep.comparisons[0].baseline, "eda-mcc");
        let rep = compare(&a, &a, None, Format::Csv);
        assert!(rep.is_err());
    }
}
