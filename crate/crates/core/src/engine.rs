//! The generational loop shared by every algorithm.

use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::population::{
    elitist_replace, to_matrix, truncation_select, uniform_init, Bounds, EvaluationBudget,
    Individual, Population, SelectionConfig,
};
use crate::rng::{Purpose, StreamRng, Streams};

/// A function to minimize over a box.
pub trait Objective {
    fn bounds(&self) -> &Bounds;

    /// `x` has length `self.bounds().dim()` and lies inside the bounds.
    fn value(&self, x: &[f64]) -> f64;

    fn dim(&self) -> usize {
        self.bounds().dim()
    }
}

/// A model-building/sampling pair.
pub trait Strategy {
    type Model;

    /// Fits a model to the `m x n` matrix of selected individuals.
    fn build(&self, selected: &DMatrix<f64>, streams: &Streams, generation: usize) -> Result<Self::Model>;

    /// Draws one new point, already repaired into `bounds`.
    fn sample(&self, model: &Self::Model, rng: &mut StreamRng, bounds: &Bounds) -> Result<Vec<f64>>;

    /// Strongly dependent variables of the model, for strategies that have them.
    fn strong_set(&self, _model: &Self::Model) -> Option<Vec<usize>> {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSettings {
    pub population_size: usize,
    pub tau: f64,
    pub max_fes: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Cumulative function evaluations at the end of this generation.
    pub fes: u64,
    /// Best fitness found so far.
    pub best_fitness: f64,
    /// Strong-set members of the model built this generation, if the
    /// strategy distinguishes them. Always `None` for generation 0.
    pub strong: Option<Vec<usize>>,
}

impl GenerationRecord {
    pub fn n_strong(&self) -> Option<usize> {
        self.strong.as_ref().map(Vec::len)
    }
}

/// Wall-clock seconds spent per phase over a whole run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub model_build: f64,
    pub sampling: f64,
    pub evaluation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub generations: Vec<GenerationRecord>,
    pub timings: PhaseTimings,
    pub best: Individual,
    pub seed: u64,
}

impl RunTrace {
    pub fn final_best(&self) -> f64 {
        self.best.fitness.expect("best individual is evaluated")
    }

    pub fn total_fes(&self) -> u64 {
        self.generations.last().map_or(0, |g| g.fes)
    }
}

fn evaluate_all<O: Objective + ?Sized>(
    objective: &O,
    members: &mut [Individual],
    budget: &mut EvaluationBudget,
) {
    for ind in members {
        ind.fitness = Some(objective.value(&ind.coordinates));
        budget.charge();
    }
}

/// Runs the EDA loop until the budget is exhausted at a generation boundary.
pub fn run<O, S>(objective: &O, strategy: &S, settings: &RunSettings) -> Result<RunTrace>
where
    O: Objective + ?Sized,
    S: Strategy + ?Sized,
{
    run_with_observer(objective, strategy, settings, |_| {})
}

/// Like [`run`], calling `observer` after every generation.
pub fn run_with_observer<O, S, F>(
    objective: &O,
    strategy: &S,
    settings: &RunSettings,
    mut observer: F,
) -> Result<RunTrace>
where
    O: Objective + ?Sized,
    S: Strategy + ?Sized,
    F: FnMut(&GenerationRecord),
{
    let size = settings.population_size;
    let selection = SelectionConfig::new(settings.tau, size)?;
    if settings.max_fes < size as u64 {
        return Err(Error::BudgetTooSmall {
            max_fes: settings.max_fes,
            population: size,
        });
    }
    let bounds = objective.bounds();
    let streams = Streams::new(settings.seed);
    let mut budget = EvaluationBudget::new(settings.max_fes);
    let mut timings = PhaseTimings::default();

    let mut pop = uniform_init(bounds, size, &mut streams.stream(0, Purpose::Init))?;
    let t = Instant::now();
    evaluate_all(objective, &mut pop.members, &mut budget);
    timings.evaluation += t.elapsed().as_secs_f64();

    let mut generations = Vec::new();
    let record = GenerationRecord {
        generation: 0,
        fes: budget.used_fes,
        best_fitness: best_of(&pop),
        strong: None,
    };
    observer(&record);
    generations.push(record);

    while !budget.exhausted() {
        let generation = pop.generation + 1;

        let t = Instant::now();
        let selected = to_matrix(&truncation_select(&pop, selection.m)?);
        let model = strategy.build(&selected, &streams, generation)?;
        timings.model_build += t.elapsed().as_secs_f64();

        let t = Instant::now();
        let mut rng = streams.stream(generation, Purpose::Sampling);
        let mut offspring = (1..size)
            .map(|_| strategy.sample(&model, &mut rng, bounds).map(Individual::new))
            .collect::<Result<Vec<_>>>()?;
        timings.sampling += t.elapsed().as_secs_f64();

        let t = Instant::now();
        evaluate_all(objective, &mut offspring, &mut budget);
        timings.evaluation += t.elapsed().as_secs_f64();

        pop = elitist_replace(pop, offspring)?;
        let record = GenerationRecord {
            generation,
            fes: budget.used_fes,
            best_fitness: best_of(&pop),
            strong: strategy.strong_set(&model),
        };
        observer(&record);
        generations.push(record);
    }

    let (best_idx, _) = pop.best().expect("population is evaluated");
    Ok(RunTrace {
        generations,
        timings,
        best: pop.members.swap_remove(best_idx),
        seed: settings.seed,
    })
}

fn best_of(pop: &Population) -> f64 {
    pop.best().expect("population is evaluated").1
}
