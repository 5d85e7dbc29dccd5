//! The Gaussian EDAs: univariate, full-covariance (plain and eigen-scaled),
//! and the model-complexity-controlled composite.

use std::fmt;

use nalgebra::DMatrix;

use crate::engine::{run_with_observer, GenerationRecord, Objective, RunSettings, RunTrace, Strategy};
use crate::error::Result;
use crate::gaussian::{
    cholesky_factor, eeda_scale, fit_multivariate, fit_univariate, MultivariateGaussian,
    UnivariateGaussianSet,
};
use crate::mcc::{build_composite, sample_composite, CompositeModel, MccConfig};
use crate::population::Bounds;
use crate::rng::{StreamRng, Streams};

/// Independent Gaussian per variable.
#[derive(Clone, Copy, Debug, Default)]
pub struct Univariate;

impl Strategy for Univariate {
    type Model = UnivariateGaussianSet;

    fn build(&self, selected: &DMatrix<f64>, _: &Streams, _: usize) -> Result<Self::Model> {
        fit_univariate(selected)
    }

    fn sample(&self, model: &Self::Model, rng: &mut StreamRng, bounds: &Bounds) -> Result<Vec<f64>> {
        crate::gaussian::sample_univariate(model, rng, bounds)
    }
}

/// One full-covariance Gaussian over all variables, optionally with the
/// minimum eigenvalue raised to the maximum.
#[derive(Clone, Copy, Debug, Default)]
pub struct FullCovariance {
    pub eigen_scaled: bool,
}

impl Strategy for FullCovariance {
    type Model = MultivariateGaussian;

    fn build(&self, selected: &DMatrix<f64>, _: &Streams, _: usize) -> Result<Self::Model> {
        let mut g = fit_multivariate(selected)?;
        if self.eigen_scaled {
            g = eeda_scale(g).0;
        }
        cholesky_factor(g)
    }

    fn sample(&self, model: &Self::Model, rng: &mut StreamRng, bounds: &Bounds) -> Result<Vec<f64>> {
        crate::gaussian::sample_multivariate(model, rng, bounds)
    }
}

/// Weak-variable identification plus subspace modelling.
#[derive(Clone, Debug, Default)]
pub struct Composite {
    pub config: MccConfig,
}

impl Strategy for Composite {
    type Model = CompositeModel;

    fn build(&self, selected: &DMatrix<f64>, streams: &Streams, generation: usize) -> Result<Self::Model> {
        build_composite(selected, &self.config, streams, generation)
    }

    fn sample(&self, model: &Self::Model, rng: &mut StreamRng, bounds: &Bounds) -> Result<Vec<f64>> {
        sample_composite(model, rng, bounds)
    }

    fn strong_set(&self, model: &Self::Model) -> Option<Vec<usize>> {
        Some(model.partition.strong())
    }
}

/// Runtime choice between the strategies above.
#[derive(Clone, Debug, PartialEq)]
pub enum Algorithm {
    Umda,
    Emna,
    Eeda,
    Mcc(MccConfig),
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Umda => f.write_str("UMDA"),
            Algorithm::Emna => f.write_str("EMNA"),
            Algorithm::Eeda => f.write_str("EEDA"),
            Algorithm::Mcc(_) => f.write_str("EDA-MCC"),
        }
    }
}

impl Algorithm {
    pub fn run<O: Objective + ?Sized>(&self, objective: &O, settings: &RunSettings) -> Result<RunTrace> {
        self.run_with_observer(objective, settings, |_| {})
    }

    pub fn run_with_observer<O, F>(&self, objective: &O, settings: &RunSettings, observer: F) -> Result<RunTrace>
    where
        O: Objective + ?Sized,
        F: FnMut(&GenerationRecord),
    {
        match self {
            Algorithm::Umda => run_with_observer(objective, &Univariate, settings, observer),
            Algorithm::Emna => run_with_observer(
                objective,
                &FullCovariance { eigen_scaled: false },
                settings,
                observer,
            ),
            Algorithm::Eeda => run_with_observer(
                objective,
                &FullCovariance { eigen_scaled: true },
                settings,
                observer,
            ),
            Algorithm::Mcc(config) => run_with_observer(
                objective,
                &Composite {
                    config: config.clone(),
                },
                settings,
                observer,
            ),
        }
    }
}
