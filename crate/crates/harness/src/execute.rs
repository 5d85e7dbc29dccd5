//! Multi-run execution with incremental persistence.

use std::fs;
use std::path::{Path, PathBuf};

use edamcc::{instantiate, BenchmarkProblem, RunTrace};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RunOutcome {
    Completed {
        /// `F(x_best) - F(x*)`.
        final_error: f64,
        trace: RunTrace,
    },
    Failed {
        message: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    /// Group label used in reports; the algorithm name unless relabelled.
    pub label: String,
    pub pop_size: usize,
    pub run: usize,
    pub seed: u64,
    pub outcome: RunOutcome,
}

impl RunRecord {
    pub fn final_error(&self) -> Option<f64> {
        match &self.outcome {
            RunOutcome::Completed { final_error, .. } => Some(*final_error),
            RunOutcome::Failed { .. } => None,
        }
    }

    pub fn trace(&self) -> Option<&RunTrace> {
        match &self.outcome {
            RunOutcome::Completed { trace, .. } => Some(trace),
            RunOutcome::Failed { .. } => None,
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}_M{}_run{:03}.json", self.label, self.pop_size, self.run)
    }
}

pub const RECORDS_DIR: &str = "records";

#[derive(Clone, Debug, Default)]
pub struct ExecOptions {
    /// Worker threads; `None` lets rayon decide.
    pub jobs: Option<usize>,
    /// Where finished records are written, one JSON file each.
    pub persist: Option<PathBuf>,
}

/// Runs one configured run against an already instantiated problem.
pub fn execute_one(config: &ExperimentConfig, problem: &BenchmarkProblem, pop_size: usize, run: usize) -> RunRecord {
    let settings = config.run_settings(pop_size, run);
    let outcome = match config.algorithm().run(problem, &settings) {
        Ok(trace) => RunOutcome::Completed {
            final_error: trace.final_best() - problem.optimum_value,
            trace,
        },
        Err(e) => RunOutcome::Failed {
            message: e.to_string(),
        },
    };
    RunRecord {
        config: config.clone(),
        label: config.algorithm.to_string(),
        pop_size,
        run,
        seed: settings.seed,
        outcome,
    }
}

/// Executes `runs` runs for every population size, returning records ordered
/// by population size then run index. Failed runs are recorded, not raised.
pub fn execute(config: &ExperimentConfig, options: &ExecOptions) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let problem = instantiate(&config.problem_spec())?;
    if let Some(dir) = &options.persist {
        fs::create_dir_all(dir).map_err(HarnessError::io(dir))?;
    }
    let tasks: Vec<(usize, usize)> = config
        .population_sizes
        .iter()
        .flat_map(|&m| (0..config.runs).map(move |r| (m, r)))
        .collect();

    let work = || {
        tasks
            .par_iter()
            .map(|&(m, r)| {
                let record = execute_one(config, &problem, m, r);
                if let Some(dir) = &options.persist {
                    save_record(&record, dir)?;
                }
                Ok(record)
            })
            .collect::<Result<Vec<_>>>()
    };
    let mut records = match options.jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .expect("thread pool")
            .install(work)?,
        None => work()?,
    };
    records.sort_by_key(|r| (r.pop_size, r.run));
    Ok(records)
}

/// Writes a record atomically: to a temporary name, then renamed.
pub fn save_record(record: &RunRecord, dir: &Path) -> Result<PathBuf> {
    let path = dir.join(record.file_name());
    let tmp = path.with_extension("json.tmp");
    let text = serde_json::to_string(record).map_err(|source| HarnessError::Json {
        path: path.clone(),
        source,
    })?;
    fs::write(&tmp, text).map_err(HarnessError::io(&tmp))?;
    fs::rename(&tmp, &path).map_err(HarnessError::io(&path))?;
    Ok(path)
}

pub fn load_record(path: &Path) -> Result<RunRecord> {
    let text = fs::read_to_string(path).map_err(HarnessError::io(path))?;
    serde_json::from_str(&text).map_err(|source| HarnessError::Json {
        path: path.to_owned(),
        source,
    })
}

/// Loads every `*.json` record in `dir`, sorted by label, size and run.
/// Partially written `*.json.tmp` files are skipped.
pub fn load_records(dir: &Path) -> Result<Vec<RunRecord>> {
    let mut records = Vec::new();
    for entry in fs::read_dir(dir).map_err(HarnessError::io(dir))? {
        let path = entry.map_err(HarnessError::io(dir))?.path();
        if path.extension().is_some_and(|e| e == "json") {
            records.push(load_record(&path)?);
        }
    }
    records.sort_by(|a, b| (&a.label, a.pop_size, a.run).cmp(&(&b.label, b.pop_size, b.run)));
    Ok(records)
}
