//! Experiment configuration files.
//!
//! The format is flat `key = value` lines with `#` comments. A line holding
//! more than one `=` is read as whitespace-separated `key=value` tokens, so
//! `problem=F1 n=50 algorithm=eda-mcc` works on one line. Lists are
//! comma-separated.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use edamcc::engine::RunSettings;
use edamcc::population::SelectionConfig;
use edamcc::rng::derive_seed;
use edamcc::{Algorithm, BaseModel, FunctionId, MccConfig, PartitionMode, ProblemInstanceSpec, TransformSource};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmName {
    Umda,
    Emna,
    Eeda,
    EdaMcc,
    EdaMccGc,
    EdaMccWiOnly,
    EdaMccSmOnly,
}

impl AlgorithmName {
    pub const ALL: [AlgorithmName; 7] = [
        AlgorithmName::Umda,
        AlgorithmName::Emna,
        AlgorithmName::Eeda,
        AlgorithmName::EdaMcc,
        AlgorithmName::EdaMccGc,
        AlgorithmName::EdaMccWiOnly,
        AlgorithmName::EdaMccSmOnly,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmName::Umda => "umda",
            AlgorithmName::Emna => "emna",
            AlgorithmName::Eeda => "eeda",
            AlgorithmName::EdaMcc => "eda-mcc",
            AlgorithmName::EdaMccGc => "eda-mcc-gc",
            AlgorithmName::EdaMccWiOnly => "eda-mcc-wi-only",
            AlgorithmName::EdaMccSmOnly => "eda-mcc-sm-only",
        }
    }

    pub fn is_mcc(self) -> bool {
        !matches!(self, AlgorithmName::Umda | AlgorithmName::Emna | AlgorithmName::Eeda)
    }
}

impl fmt::Display for AlgorithmName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        AlgorithmName::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = AlgorithmName::ALL.iter().map(|a| a.as_str()).collect();
                format!("unknown algorithm {s:?}; expected one of {}", names.join(", "))
            })
    }
}

pub const DEFAULT_POPULATION_SIZES: [usize; 4] = [200, 500, 1000, 2000];
pub const DEFAULT_RUNS: usize = 25;
pub const DEFAULT_BUDGET_PER_DIM: u64 = 10_000;
/// Shared by every algorithm so that comparisons run on the same instances.
pub const DEFAULT_INSTANCE_SEED: u64 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: FunctionId,
    pub n: usize,
    /// Directory of transform files; seeded generation when absent.
    pub transforms: Option<PathBuf>,
    pub instance_seed: u64,
    pub bias: f64,
    pub algorithm: AlgorithmName,
    pub population_sizes: Vec<usize>,
    pub tau: f64,
    pub theta: f64,
    pub c: usize,
    pub m_corr: usize,
    pub base_model: BaseModel,
    pub budget_fes: u64,
    pub runs: usize,
    pub seed: u64,
    pub out: PathBuf,
}

const KEYS: [&str; 16] = [
    "problem",
    "n",
    "algorithm",
    "population_sizes",
    "tau",
    "theta",
    "c",
    "m_corr",
    "base_model",
    "budget_fes",
    "runs",
    "seed",
    "out",
    "transforms",
    "bias",
    "instance_seed",
];

fn split_pair(line: usize, token: &str) -> Result<(String, String)> {
    let (k, v) = token.split_once('=').ok_or_else(|| HarnessError::Syntax {
        line,
        message: format!("expected key=value, got {token:?}"),
    })?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || v.is_empty() || v.contains('=') {
        return Err(HarnessError::Syntax {
            line,
            message: format!("expected key=value, got {token:?}"),
        });
    }
    Ok((k.to_owned(), v.to_owned()))
}

fn tokenize(text: &str) -> Result<BTreeMap<String, String>> {
    let mut pairs = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let found = if line.matches('=').count() == 1 {
            vec![split_pair(idx + 1, line)?]
        } else {
            line.split_whitespace()
                .map(|t| split_pair(idx + 1, t))
                .collect::<Result<Vec<_>>>()?
        };
        for (k, v) in found {
            if !KEYS.contains(&k.as_str()) {
                return Err(HarnessError::UnknownKey(k));
            }
            if pairs.insert(k.clone(), v).is_some() {
                return Err(HarnessError::DuplicateKey(k));
            }
        }
    }
    Ok(pairs)
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.parse::<T>()
        .map_err(|e| HarnessError::invalid(key, format!("cannot parse {v:?}: {e}")))
}

struct Fields(BTreeMap<String, String>);

impl Fields {
    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.0.get(key).map(|v| parse_value(key, v)).transpose()
    }

    fn require<T: FromStr>(&self, key: &'static str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        self.get(key)?.ok_or(HarnessError::MissingKey(key))
    }
}

/// Parses and validates a config, applying defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let f = Fields(tokenize(text)?);
    let problem: FunctionId = f.require("problem")?;
    let algorithm: AlgorithmName = f.require("algorithm")?;
    let n: usize = f.require("n")?;
    let population_sizes = match f.0.get("population_sizes") {
        Some(v) => v
            .split(',')
            .map(|s| parse_value::<usize>("population_sizes", s.trim()))
            .collect::<Result<Vec<_>>>()?,
        None => DEFAULT_POPULATION_SIZES.to_vec(),
    };
    let base_model = match f.0.get("base_model").map(String::as_str) {
        None | Some("eeda") => BaseModel::EigenScaled,
        Some("plain") => BaseModel::Plain,
        Some(other) => {
            return Err(HarnessError::invalid(
                "base_model",
                format!("expected eeda or plain, got {other:?}"),
            ))
        }
    };
    let config = ExperimentConfig {
        problem,
        n,
        transforms: f.get("transforms")?,
        instance_seed: f.get("instance_seed")?.unwrap_or(DEFAULT_INSTANCE_SEED),
        bias: f.get("bias")?.unwrap_or(0.0),
        algorithm,
        population_sizes,
        tau: f.get("tau")?.unwrap_or(0.5),
        theta: f.get("theta")?.unwrap_or(0.3),
        c: f.get("c")?.unwrap_or(MccConfig::default().c.min(n)),
        m_corr: f.get("m_corr")?.unwrap_or(MccConfig::default().m_corr),
        base_model,
        budget_fes: f.get("budget_fes")?.unwrap_or(DEFAULT_BUDGET_PER_DIM * n as u64),
        runs: f.get("runs")?.unwrap_or(DEFAULT_RUNS),
        seed: f.get("seed")?.unwrap_or(0),
        out: f.get("out")?.unwrap_or_else(|| PathBuf::from("results")),
    };
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
    parse_config(&text)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(HarnessError::invalid("n", format!("must be at least 2, got {}", self.n)));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(HarnessError::invalid("tau", format!("must lie in (0, 1], got {}", self.tau)));
        }
        if self.population_sizes.is_empty() {
            return Err(HarnessError::invalid("population_sizes", "must not be empty"));
        }
        for &size in &self.population_sizes {
            SelectionConfig::new(self.tau, size).map_err(|e| {
                HarnessError::invalid("population_sizes", format!("size {size}: {e}"))
            })?;
            if self.budget_fes < size as u64 {
                return Err(HarnessError::invalid(
                    "budget_fes",
                    format!("{} is smaller than population size {size}", self.budget_fes),
                ));
            }
        }
        if self.runs == 0 {
            return Err(HarnessError::invalid("runs", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(HarnessError::invalid("theta", format!("must lie in [0, 1], got {}", self.theta)));
        }
        let min_c = if self.algorithm == AlgorithmName::EdaMccGc { 2 } else { 1 };
        if self.c < min_c || self.c > self.n {
            return Err(HarnessError::invalid(
                "c",
                format!("must lie in [{min_c}, {}], got {}", self.n, self.c),
            ));
        }
        if self.m_corr < 2 {
            return Err(HarnessError::invalid("m_corr", format!("must be at least 2, got {}", self.m_corr)));
        }
        if !self.bias.is_finite() {
            return Err(HarnessError::invalid("bias", "must be finite"));
        }
        Ok(())
    }

    pub fn problem_spec(&self) -> ProblemInstanceSpec {
        ProblemInstanceSpec {
            id: self.problem,
            n: self.n,
            source: match &self.transforms {
                Some(dir) => TransformSource::Directory(dir.clone()),
                None => TransformSource::Seeded(self.instance_seed),
            },
            bias: Some(self.bias),
        }
    }

    pub fn mcc_config(&self) -> MccConfig {
        let mut m = MccConfig {
            theta: self.theta,
            c: self.c,
            m_corr: self.m_corr,
            base_model: self.base_model,
            ..MccConfig::default()
        };
        match self.algorithm {
            AlgorithmName::EdaMccGc => m.partition_mode = PartitionMode::GreedyCluster,
            AlgorithmName::EdaMccWiOnly => m.sm_enabled = false,
            AlgorithmName::EdaMccSmOnly => m.wi_enabled = false,
            _ => {}
        }
        m
    }

    pub fn algorithm(&self) -> Algorithm {
        match self.algorithm {
            AlgorithmName::Umda => Algorithm::Umda,
            AlgorithmName::Emna => Algorithm::Emna,
            AlgorithmName::Eeda => Algorithm::Eeda,
            _ => Algorithm::Mcc(self.mcc_config()),
        }
    }

    /// Seed of one run, derived from the root seed, population size and run index.
    pub fn run_seed(&self, population_size: usize, run: usize) -> u64 {
        derive_seed(&[self.seed, population_size as u64, run as u64])
    }

    pub fn run_settings(&self, population_size: usize, run: usize) -> RunSettings {
        RunSettings {
            population_size,
            tau: self.tau,
            max_fes: self.budget_fes,
            seed: self.run_seed(population_size, run),
        }
    }
}
