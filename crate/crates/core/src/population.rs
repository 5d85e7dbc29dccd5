//! Individuals, populations and the selection/replacement operators shared by
//! every algorithm.

use nalgebra::DMatrix;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned search box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        for (dim, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(Error::InvalidBounds {
                    dim,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval on every axis.
    pub fn uniform(n: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; n], vec![upper; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| lo <= v && v <= hi)
    }

    /// Clips every coordinate into its interval.
    pub fn repair(&self, x: &mut [f64]) {
        for (v, (&lo, &hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(lo, hi);
        }
    }

    /// Clips coordinate `dim` into its interval.
    pub fn repair_coordinate(&self, dim: usize, v: f64) -> f64 {
        v.clamp(self.lower[dim], self.upper[dim])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub coordinates: Vec<f64>,
    /// `None` until the objective has been evaluated.
    pub fitness: Option<f64>,
}

impl Individual {
    pub fn new(coordinates: Vec<f64>) -> Self {
        Self {
            coordinates,
            fitness: None,
        }
    }

    pub fn evaluated(coordinates: Vec<f64>, fitness: f64) -> Self {
        Self {
            coordinates,
            fitness: Some(fitness),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: usize,
}

impl Population {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Index and fitness of the best evaluated member; the lowest index wins ties.
    pub fn best(&self) -> Option<(usize, f64)> {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, ind)| ind.fitness.map(|f| (i, f)))
            .fold(None, |best, (i, f)| match best {
                Some((_, bf)) if f.total_cmp(&bf).is_ge() => best,
                _ => Some((i, f)),
            })
    }
}

/// Truncation selection parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionConfig {
    pub tau: f64,
    pub m: usize,
}

impl SelectionConfig {
    /// `m = floor(tau * population)`, which must be at least 2.
    pub fn new(tau: f64, population: usize) -> Result<Self> {
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::InvalidTau(tau));
        }
        let m = (tau * population as f64).floor() as usize;
        if m < 2 || m > population {
            return Err(Error::InvalidSelectionSize { m, population });
        }
        Ok(Self { tau, m })
    }
}

/// Counts objective evaluations against a fixed allowance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvaluationBudget {
    pub max_fes: u64,
    pub used_fes: u64,
}

impl EvaluationBudget {
    pub fn new(max_fes: u64) -> Self {
        Self {
            max_fes,
            used_fes: 0,
        }
    }

    pub fn charge(&mut self) {
        self.used_fes += 1;
    }

    pub fn exhausted(&self) -> bool {
        self.used_fes >= self.max_fes
    }
}

/// Draws `size` individuals uniformly inside `bounds`, all unevaluated.
pub fn uniform_init<R: Rng + ?Sized>(bounds: &Bounds, size: usize, rng: &mut R) -> Result<Population> {
    if size < 2 {
        return Err(Error::PopulationTooSmall(size));
    }
    let members = (0..size)
        .map(|_| {
            let x = bounds
                .lower
                .iter()
                .zip(&bounds.upper)
                .map(|(&lo, &hi)| rng.random_range(lo..hi))
                .collect();
            Individual::new(x)
        })
        .collect();
    Ok(Population {
        members,
        generation: 0,
    })
}

/// The `m` fittest members in ascending fitness order. Equal fitness keeps
/// population order.
pub fn truncation_select(pop: &Population, m: usize) -> Result<Vec<&Individual>> {
    if m < 2 || m > pop.len() {
        return Err(Error::InvalidSelectionSize {
            m,
            population: pop.len(),
        });
    }
    let mut ranked = pop
        .members
        .iter()
        .enumerate()
        .map(|(i, ind)| ind.fitness.map(|f| (f, ind)).ok_or(Error::Unevaluated(i)))
        .collect::<Result<Vec<_>>>()?;
    // sort_by is stable
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(ranked.into_iter().take(m).map(|(_, ind)| ind).collect())
}

/// Keeps the single best member of `old` and fills the rest with `offspring`.
pub fn elitist_replace(old: Population, offspring: Vec<Individual>) -> Result<Population> {
    let expected = old.len().saturating_sub(1);
    if offspring.len() != expected {
        return Err(Error::OffspringCount {
            expected,
            found: offspring.len(),
        });
    }
    if let Some(i) = offspring.iter().position(|o| o.fitness.is_none()) {
        return Err(Error::Unevaluated(i + 1));
    }
    let (elite_idx, _) = old.best().ok_or(Error::Unevaluated(0))?;
    let generation = old.generation + 1;
    let elite = old.members.into_iter().nth(elite_idx).expect("index from best()");
    let mut members = Vec::with_capacity(offspring.len() + 1);
    members.push(elite);
    members.extend(offspring);
    Ok(Population {
        members,
        generation,
    })
}

/// Picks `m_corr` distinct indices into a list of length `m`.
pub fn subsample_indices<R: Rng + ?Sized>(m: usize, m_corr: usize, rng: &mut R) -> Result<Vec<usize>> {
    if m_corr > m {
        return Err(Error::SubsampleTooLarge {
            requested: m_corr,
            available: m,
        });
    }
    if m_corr < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            found: m_corr,
        });
    }
    Ok(index::sample(rng, m, m_corr).into_vec())
}

/// Random subset of `selected` of size `m_corr`, drawn without replacement.
pub fn subsample_without_replacement<'a, T, R: Rng + ?Sized>(
    selected: &'a [T],
    m_corr: usize,
    rng: &mut R,
) -> Result<Vec<&'a T>> {
    Ok(subsample_indices(selected.len(), m_corr, rng)?
        .into_iter()
        .map(|i| &selected[i])
        .collect())
}

/// Stacks coordinates into an `m x n` matrix, one row per individual.
pub fn to_matrix(individuals: &[&Individual]) -> DMatrix<f64> {
    let m = individuals.len();
    let n = individuals.first().map_or(0, |i| i.coordinates.len());
    DMatrix::from_fn(m, n, |r, c| individuals[r].coordinates[c])
}
