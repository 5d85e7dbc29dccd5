//! Gaussian estimation-of-distribution algorithms for continuous
//! minimization, including model complexity control (MCC): weakly dependent
//! variables get a univariate model, the rest are split into small random
//! subsets that each get a full-covariance model.
//!
//! ```
//! use edamcc::{instantiate, Algorithm, FunctionId, MccConfig, ProblemInstanceSpec, RunSettings};
//!
//! let problem = instantiate(&ProblemInstanceSpec::seeded(FunctionId::F1, 10, 7)).unwrap();
//! let settings = RunSettings { population_size: 100, tau: 0.5, max_fes: 5_000, seed: 1 };
//! let trace = Algorithm::Mcc(MccConfig { c: 5, m_corr: 50, ..MccConfig::default() })
//!     .run(&problem, &settings)
//!     .unwrap();
//! assert!(trace.final_best() < 1e3);
//! ```

pub mod benchmarks;
pub mod engine;
mod error;
pub mod gaussian;
pub mod mcc;
pub mod population;
pub mod rng;
pub mod stats;
pub mod strategies;

pub use benchmarks::{instantiate, BenchmarkProblem, FunctionId, ProblemInstanceSpec, TransformSource};
pub use engine::{GenerationRecord, Objective, PhaseTimings, RunSettings, RunTrace, Strategy};
pub use error::{Error, Result};
pub use mcc::{BaseModel, MccConfig, PartitionMode, StructureTrace};
pub use strategies::Algorithm;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/eda-loop.md")]
    mod eda_loop {}
    #[doc = include_str!("../../../book/src/gaussian-models.md")]
    mod gaussian_models {}
    #[doc = include_str!("../../../book/src/model-complexity-control.md")]
    mod model_complexity_control {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
}
