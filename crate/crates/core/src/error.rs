use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid bounds for dimension {dim}: lower {lower} must be below upper {upper}")]
    InvalidBounds { dim: usize, lower: f64, upper: f64 },

    #[error("population size {0} is too small (need at least 2)")]
    PopulationTooSmall(usize),

    #[error("selection size {m} is outside [2, {population}]")]
    InvalidSelectionSize { m: usize, population: usize },

    #[error("truncation ratio {0} must lie in (0, 1]")]
    InvalidTau(f64),

    #[error("member {0} of the population has not been evaluated")]
    Unevaluated(usize),

    #[error("expected {expected} offspring, got {found}")]
    OffspringCount { expected: usize, found: usize },

    #[error("cannot draw {requested} distinct rows from {available}")]
    SubsampleTooLarge { requested: usize, available: usize },

    #[error("at least {required} data rows are needed, got {found}")]
    TooFewSamples { required: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("covariance matrix could not be factored even with jitter {max_jitter:e}")]
    Factorization { max_jitter: f64 },

    #[error("model has no Cholesky factor; call `factor` first")]
    MissingFactor,

    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),

    #[error("evaluation budget {max_fes} cannot cover an initial population of {population}")]
    BudgetTooSmall { max_fes: u64, population: usize },

    #[error("{id} requires n >= {min}, got {n}")]
    ProblemTooSmall { id: String, n: usize, min: usize },

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: token {index} ({token:?}) is not a decimal number")]
    TransformParse {
        path: PathBuf,
        index: usize,
        token: String,
    },

    #[error("{path}: expected {expected} values, found {found}")]
    TransformSize {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("{path}: rotation is not orthogonal (||M M^T - I||_F = {deviation:e})")]
    NotOrthogonal { path: PathBuf, deviation: f64 },

    #[error("sample must not be empty")]
    EmptySample,
}
