//! Model complexity control.
//!
//! Variables whose absolute correlation with every other variable stays at or
//! below `theta` are treated as weakly dependent and get independent
//! univariate Gaussians. The remaining strongly dependent variables are split
//! into subsets of at most `c` variables, each modelled by its own full
//! Gaussian. The joint density is the product of all these factors, so the
//! implied covariance is block diagonal.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{
    cholesky_factor, correlation_from_data, eeda_scale, fit_multivariate, fit_univariate,
    CorrelationMatrix, MultivariateGaussian, UnivariateGaussianSet,
};
use crate::population::{subsample_indices, Bounds};
use crate::rng::{Purpose, Streams};

/// How each strongly dependent subset is modelled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseModel {
    /// Plain maximum-likelihood covariance.
    Plain,
    /// Covariance with its minimum eigenvalue raised to the maximum.
    EigenScaled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionMode {
    Random,
    GreedyCluster,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MccConfig {
    pub theta: f64,
    pub c: usize,
    pub m_corr: usize,
    pub base_model: BaseModel,
    pub partition_mode: PartitionMode,
    /// When false every variable is treated as strongly dependent.
    pub wi_enabled: bool,
    /// When false the strong set is modelled as a single Gaussian.
    pub sm_enabled: bool,
}

impl Default for MccConfig {
    fn default() -> Self {
        Self {
            theta: 0.3,
            c: 20,
            m_corr: 100,
            base_model: BaseModel::EigenScaled,
            partition_mode: PartitionMode::Random,
            wi_enabled: true,
            sm_enabled: true,
        }
    }
}

impl MccConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::InvalidConfig(format!(
                "theta must lie in [0, 1], got {}",
                self.theta
            )));
        }
        let min_c = match self.partition_mode {
            PartitionMode::Random => 1,
            PartitionMode::GreedyCluster => 2,
        };
        if self.c < min_c || self.c > n.max(min_c) {
            return Err(Error::InvalidConfig(format!(
                "c must lie in [{min_c}, {n}], got {}",
                self.c
            )));
        }
        if self.m_corr < 2 {
            return Err(Error::InvalidConfig(format!(
                "m_corr must be at least 2, got {}",
                self.m_corr
            )));
        }
        Ok(())
    }
}

/// Assignment of every variable to exactly one sub-model.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VariablePartition {
    /// Weakly dependent variables, ascending.
    pub weak: Vec<usize>,
    pub strong_subsets: Vec<Vec<usize>>,
    /// Strong variables that greedy clustering could not place; modelled univariately.
    pub leftover_weak: Vec<usize>,
}

impl VariablePartition {
    /// The strong set identified by thresholding, ascending.
    pub fn strong(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .strong_subsets
            .iter()
            .flatten()
            .chain(&self.leftover_weak)
            .copied()
            .collect();
        s.sort_unstable();
        s
    }

    /// Checks that the three groups are disjoint and cover `0..n`.
    pub fn covers(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        let all = self
            .weak
            .iter()
            .chain(self.strong_subsets.iter().flatten())
            .chain(&self.leftover_weak);
        for &i in all {
            if i >= n || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        seen.into_iter().all(|s| s)
    }
}

/// Splits variables into weakly and strongly dependent sets.
///
/// `i` is weak iff `|C_ij| <= theta` for every `j != i`.
pub fn identify_weak(corr: &CorrelationMatrix, theta: f64) -> (Vec<usize>, Vec<usize>) {
    let n = corr.dim();
    (0..n).partition(|&i| (0..n).all(|j| j == i || corr.abs(i, j) <= theta))
}

/// Shuffles `strong` and cuts it into consecutive chunks of `c`.
pub fn partition_random<R: Rng + ?Sized>(strong: &[usize], c: usize, rng: &mut R) -> Vec<Vec<usize>> {
    assert!(c >= 1, "subset capacity must be positive");
    let mut perm = strong.to_vec();
    perm.shuffle(rng);
    perm.chunks(c).map(<[usize]>::to_vec).collect()
}

/// Greedy correlation clustering of `strong` into subsets of at most `c`.
///
/// Each cluster starts from the unused pair with the largest `|corr|` above
/// `theta`, then repeatedly absorbs the unused variable whose largest `|corr|`
/// to any current member is maximal and above `theta`. Lower indices win
/// ties. Returns the clusters and the variables left unclustered.
pub fn partition_greedy(
    strong: &[usize],
    corr: &CorrelationMatrix,
    theta: f64,
    c: usize,
) -> (Vec<Vec<usize>>, Vec<usize>) {
    assert!(c >= 2, "greedy clustering needs c >= 2");
    let mut remaining: Vec<usize> = strong.to_vec();
    remaining.sort_unstable();
    let mut clusters = Vec::new();

    loop {
        let mut seed: Option<(usize, usize, f64)> = None;
        for (a, &i) in remaining.iter().enumerate() {
            for &j in &remaining[a + 1..] {
                let v = corr.abs(i, j);
                if v > theta && seed.is_none_or(|(_, _, best)| v > best) {
                    seed = Some((i, j, v));
                }
            }
        }
        let Some((i, j, _)) = seed else { break };
        remaining.retain(|&k| k != i && k != j);
        let mut cluster = vec![i, j];
        // affinity[k] = max |corr| between remaining[k] and the cluster
        let mut affinity: Vec<f64> = remaining
            .iter()
            .map(|&k| corr.abs(k, i).max(corr.abs(k, j)))
            .collect();

        while cluster.len() < c {
            let mut pick: Option<(usize, f64)> = None;
            for (pos, &a) in affinity.iter().enumerate() {
                if a > theta && pick.is_none_or(|(_, best)| a > best) {
                    pick = Some((pos, a));
                }
            }
            let Some((pos, _)) = pick else { break };
            let x = remaining.remove(pos);
            affinity.remove(pos);
            for (k, a) in remaining.iter().zip(affinity.iter_mut()) {
                *a = a.max(corr.abs(*k, x));
            }
            cluster.push(x);
        }
        clusters.push(cluster);
    }
    (clusters, remaining)
}

/// Product of univariate factors over the weak variables and one full
/// Gaussian per strong subset.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeModel {
    pub n: usize,
    /// Variable indices covered by `weak_model`, ascending.
    pub weak_indices: Vec<usize>,
    pub weak_model: UnivariateGaussianSet,
    pub subspace_models: Vec<(Vec<usize>, MultivariateGaussian)>,
    pub partition: VariablePartition,
}

fn select_columns(data: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    data.select_columns(cols)
}

fn select_rows(data: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    data.select_rows(rows)
}

/// Builds the composite model from the `m x n` matrix of selected individuals.
///
/// Correlations come from a random subsample of `m_corr` rows (all rows if
/// fewer are available); every model parameter is fitted on all `m` rows.
pub fn build_composite(
    selected: &DMatrix<f64>,
    config: &MccConfig,
    streams: &Streams,
    generation: usize,
) -> Result<CompositeModel> {
    let (m, n) = selected.shape();
    if m < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            found: m,
        });
    }
    config.validate(n)?;

    let needs_corr = config.wi_enabled
        || (config.sm_enabled && config.partition_mode == PartitionMode::GreedyCluster);
    let corr = if needs_corr {
        let rows = subsample_indices(
            m,
            config.m_corr.min(m),
            &mut streams.stream(generation, Purpose::Subsample),
        )?;
        Some(correlation_from_data(&select_rows(selected, &rows))?)
    } else {
        None
    };

    let (weak, strong) = match (&corr, config.wi_enabled) {
        (Some(c), true) => identify_weak(c, config.theta),
        _ => (Vec::new(), (0..n).collect()),
    };

    let (strong_subsets, leftover_weak) = if strong.is_empty() {
        (Vec::new(), Vec::new())
    } else if !config.sm_enabled {
        (vec![strong.clone()], Vec::new())
    } else {
        match config.partition_mode {
            PartitionMode::Random => (
                partition_random(
                    &strong,
                    config.c,
                    &mut streams.stream(generation, Purpose::Partition),
                ),
                Vec::new(),
            ),
            PartitionMode::GreedyCluster => partition_greedy(
                &strong,
                corr.as_ref().expect("correlation computed for greedy mode"),
                config.theta,
                config.c,
            ),
        }
    };

    let partition = VariablePartition {
        weak,
        strong_subsets,
        leftover_weak,
    };
    fit_composite(selected, partition, config.base_model)
}

/// Fits all factors of a composite model for a given partition.
pub fn fit_composite(
    selected: &DMatrix<f64>,
    partition: VariablePartition,
    base_model: BaseModel,
) -> Result<CompositeModel> {
    let n = selected.ncols();
    let mut weak_indices: Vec<usize> = partition
        .weak
        .iter()
        .chain(&partition.leftover_weak)
        .copied()
        .collect();
    weak_indices.sort_unstable();

    let weak_model = if weak_indices.is_empty() {
        UnivariateGaussianSet {
            means: Vec::new(),
            std_devs: Vec::new(),
        }
    } else if weak_indices.len() == n {
        fit_univariate(selected)?
    } else {
        fit_univariate(&select_columns(selected, &weak_indices))?
    };

    let subspace_models = partition
        .strong_subsets
        .iter()
        .map(|idx| {
            let mut g = fit_multivariate(&select_columns(selected, idx))?;
            if base_model == BaseModel::EigenScaled {
                g = eeda_scale(g).0;
            }
            Ok((idx.clone(), cholesky_factor(g)?))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CompositeModel {
        n,
        weak_indices,
        weak_model,
        subspace_models,
        partition,
    })
}

/// Samples every factor independently and scatters the values back to their
/// variable positions, then clips to `bounds`.
pub fn sample_composite<R: Rng + ?Sized>(
    model: &CompositeModel,
    rng: &mut R,
    bounds: &Bounds,
) -> Result<Vec<f64>> {
    if bounds.dim() != model.n {
        return Err(Error::DimensionMismatch {
            expected: model.n,
            found: bounds.dim(),
        });
    }
    let mut x = vec![f64::NAN; model.n];
    for (&i, v) in model.weak_indices.iter().zip(model.weak_model.draw(rng)) {
        x[i] = v;
    }
    for (idx, g) in &model.subspace_models {
        for (&i, v) in idx.iter().zip(g.draw(rng)?) {
            x[i] = v;
        }
    }
    bounds.repair(&mut x);
    Ok(x)
}

/// Per-generation strong-set statistics, accumulated over runs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructureTrace {
    pub n: usize,
    /// `|S|` per recorded generation, in recording order.
    pub strong_counts: Vec<usize>,
    /// `q_matrix[i][g]` counts the runs that put variable `i` in the strong set
    /// at model-building generation `g`.
    pub q_matrix: Vec<Vec<u32>>,
}

impl StructureTrace {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            strong_counts: Vec::new(),
            q_matrix: vec![Vec::new(); n],
        }
    }

    pub fn generations(&self) -> usize {
        self.q_matrix.first().map_or(0, Vec::len)
    }

    fn ensure_columns(&mut self, cols: usize) {
        for row in &mut self.q_matrix {
            if row.len() < cols {
                row.resize(cols, 0);
            }
        }
    }

    /// Adds another trace elementwise. Strong counts are summed too.
    pub fn merge(&mut self, other: &StructureTrace) {
        assert_eq!(self.n, other.n, "structure traces of different dimension");
        self.ensure_columns(other.generations());
        for (row, orow) in self.q_matrix.iter_mut().zip(&other.q_matrix) {
            for (q, o) in row.iter_mut().zip(orow) {
                *q += o;
            }
        }
        if self.strong_counts.len() < other.strong_counts.len() {
            self.strong_counts.resize(other.strong_counts.len(), 0);
        }
        for (a, b) in self.strong_counts.iter_mut().zip(&other.strong_counts) {
            *a += b;
        }
    }
}

/// Records the strong set of one run's model at model-building generation
/// `column` (0-based).
pub fn record_structure(strong: &[usize], column: usize, trace: &mut StructureTrace) {
    trace.ensure_columns(column + 1);
    if trace.strong_counts.len() <= column {
        trace.strong_counts.resize(column + 1, 0);
    }
    trace.strong_counts[column] = strong.len();
    for &i in strong {
        trace.q_matrix[i][column] += 1;
    }
}
