//! Maximum-likelihood Gaussian models.
//!
//! All estimators use the maximum-likelihood divisor `m` rather than `m - 1`.
//! Data is always laid out as an `m x d` matrix with one sample per row.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::population::Bounds;

fn check_rows(data: &DMatrix<f64>) -> Result<()> {
    if data.nrows() < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            found: data.nrows(),
        });
    }
    Ok(())
}

fn column_means(data: &DMatrix<f64>) -> DVector<f64> {
    let m = data.nrows() as f64;
    DVector::from_iterator(
        data.ncols(),
        data.column_iter().map(|col| col.iter().sum::<f64>() / m),
    )
}

/// Dot product with four independent accumulators, which lets the compiler
/// vectorize the reduction.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn centered(data: &DMatrix<f64>, mean: &DVector<f64>) -> DMatrix<f64> {
    let mut out = data.clone();
    for (mut col, &mu) in out.column_iter_mut().zip(mean.iter()) {
        col.add_scalar_mut(-mu);
    }
    out
}

/// Independent Gaussians, one per variable.
#[derive(Clone, Debug, PartialEq)]
pub struct UnivariateGaussianSet {
    pub means: Vec<f64>,
    pub std_devs: Vec<f64>,
}

impl UnivariateGaussianSet {
    pub fn dim(&self) -> usize {
        self.means.len()
    }

    /// Draws `mu_i + zeta_i * sigma_i` for every variable, without bound repair.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.means
            .iter()
            .zip(&self.std_devs)
            .map(|(&mu, &sigma)| {
                let z: f64 = rng.sample(StandardNormal);
                mu + z * sigma
            })
            .collect()
    }
}

/// Two-pass column mean and ML variance.
pub fn fit_univariate(data: &DMatrix<f64>) -> Result<UnivariateGaussianSet> {
    check_rows(data)?;
    let m = data.nrows() as f64;
    let mut means = Vec::with_capacity(data.ncols());
    let mut std_devs = Vec::with_capacity(data.ncols());
    for col in data.column_iter() {
        let mu = col.iter().sum::<f64>() / m;
        let var = col.iter().map(|&v| (v - mu) * (v - mu)).sum::<f64>() / m;
        means.push(mu);
        std_devs.push(var.sqrt());
    }
    Ok(UnivariateGaussianSet { means, std_devs })
}

pub fn sample_univariate<R: Rng + ?Sized>(
    model: &UnivariateGaussianSet,
    rng: &mut R,
    bounds: &Bounds,
) -> Result<Vec<f64>> {
    if bounds.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: bounds.dim(),
        });
    }
    let mut x = model.draw(rng);
    bounds.repair(&mut x);
    Ok(x)
}

/// Full-covariance Gaussian with an optional lower-triangular factor.
#[derive(Clone, Debug, PartialEq)]
pub struct MultivariateGaussian {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    /// `H` with `H H^T = covariance + jitter_applied * I`.
    pub factor: Option<DMatrix<f64>>,
    pub jitter_applied: f64,
}

impl MultivariateGaussian {
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        if covariance.nrows() != mean.len() || covariance.ncols() != mean.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                found: covariance.nrows(),
            });
        }
        Ok(Self {
            mean,
            covariance,
            factor: None,
            jitter_applied: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Draws `mu + H zeta` without bound repair.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let h = self.factor.as_ref().ok_or(Error::MissingFactor)?;
        let d = self.dim();
        let zeta: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let mut x: Vec<f64> = self.mean.iter().copied().collect();
        // lower triangle only; column-major walk keeps access contiguous
        for (j, &z) in zeta.iter().enumerate() {
            if z == 0.0 {
                continue;
            }
            let col = h.column(j);
            for i in j..d {
                x[i] += col[i] * z;
            }
        }
        Ok(x)
    }
}

/// Column means and ML covariance. The factor is left empty.
pub fn fit_multivariate(data: &DMatrix<f64>) -> Result<MultivariateGaussian> {
    check_rows(data)?;
    let mean = column_means(data);
    let xc = centered(data, &mean);
    let mut cov = xc.tr_mul(&xc) / data.nrows() as f64;
    symmetrize(&mut cov);
    MultivariateGaussian::new(mean, cov)
}

fn symmetrize(a: &mut DMatrix<f64>) {
    let d = a.nrows();
    for i in 0..d {
        for j in (i + 1)..d {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

/// Jitter multipliers tried in order, relative to the mean diagonal entry.
pub const JITTER_LADDER: [f64; 4] = [0.0, 1e-10, 1e-8, 1e-6];

/// Computes the lower-triangular factor, adding diagonal jitter from
/// [`JITTER_LADDER`] until the factorization succeeds.
pub fn cholesky_factor(mut model: MultivariateGaussian) -> Result<MultivariateGaussian> {
    let d = model.dim();
    if d == 0 {
        model.factor = Some(DMatrix::zeros(0, 0));
        model.jitter_applied = 0.0;
        return Ok(model);
    }
    let scale = model.covariance.trace() / d as f64;
    if scale == 0.0 && model.covariance.iter().all(|&v| v == 0.0) {
        // degenerate point mass
        model.factor = Some(DMatrix::zeros(d, d));
        model.jitter_applied = 0.0;
        return Ok(model);
    }
    let mut last = 0.0;
    for &mult in &JITTER_LADDER {
        let lambda = mult * scale;
        last = lambda;
        let mut reg = model.covariance.clone();
        if lambda > 0.0 {
            for i in 0..d {
                reg[(i, i)] += lambda;
            }
        }
        if let Some(chol) = Cholesky::new(reg) {
            model.factor = Some(chol.unpack());
            model.jitter_applied = lambda;
            return Ok(model);
        }
    }
    Err(Error::Factorization { max_jitter: last })
}

pub fn sample_multivariate<R: Rng + ?Sized>(
    model: &MultivariateGaussian,
    rng: &mut R,
    bounds: &Bounds,
) -> Result<Vec<f64>> {
    if bounds.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: bounds.dim(),
        });
    }
    let mut x = model.draw(rng)?;
    bounds.repair(&mut x);
    Ok(x)
}

/// Pearson correlation matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    pub entries: DMatrix<f64>,
    pub source_sample_size: usize,
}

impl CorrelationMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn abs(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)].abs()
    }
}

/// Pearson correlations from ML moments. A zero-variance variable gets zero
/// correlation with every other variable and a unit diagonal.
pub fn correlation_from_data(data: &DMatrix<f64>) -> Result<CorrelationMatrix> {
    check_rows(data)?;
    let m = data.nrows() as f64;
    let n = data.ncols();
    let mean = column_means(data);
    let mut z = centered(data, &mean);
    for mut col in z.column_iter_mut() {
        let ss = col.iter().map(|v| v * v).sum::<f64>();
        let sd = (ss / m).sqrt();
        if sd > 0.0 {
            col.unscale_mut(sd);
        } else {
            col.fill(0.0);
        }
    }
    // upper triangle only; columns are contiguous in column-major storage
    let rows = data.nrows();
    let zs = z.as_slice();
    let mut c = DMatrix::identity(n, n);
    for i in 0..n {
        let a = &zs[i * rows..(i + 1) * rows];
        for j in (i + 1)..n {
            let b = &zs[j * rows..(j + 1) * rows];
            let v = (dot(a, b) / m).clamp(-1.0, 1.0);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    Ok(CorrelationMatrix {
        entries: c,
        source_sample_size: data.nrows(),
    })
}

/// What [`eeda_scale`] did to the covariance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EedaOutcome {
    Scaled,
    /// The covariance had no positive eigenvalue; it was returned unchanged.
    Degenerate,
}

/// Relative tolerance for treating an eigenvalue as tied with the minimum.
pub const EEDA_TIE_TOLERANCE: f64 = 1e-9;

/// Raises the smallest eigenvalue(s) of the covariance to the largest one.
///
/// Negative eigenvalues from round-off are first clamped to `1e-12 * max`.
/// Every eigenvalue within `EEDA_TIE_TOLERANCE * max` of the minimum is
/// raised. Any cached factor is dropped.
pub fn eeda_scale(mut model: MultivariateGaussian) -> (MultivariateGaussian, EedaOutcome) {
    if model.dim() == 0 {
        return (model, EedaOutcome::Degenerate);
    }
    let eig = SymmetricEigen::new(model.covariance.clone());
    let lambda_max = eig.eigenvalues.max();
    if lambda_max.is_nan() || lambda_max <= 0.0 {
        return (model, EedaOutcome::Degenerate);
    }
    let floor = 1e-12 * lambda_max;
    let mut values: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(floor)).collect();
    let lambda_min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tie = EEDA_TIE_TOLERANCE * lambda_max;
    for l in values.iter_mut() {
        if *l - lambda_min <= tie {
            *l = lambda_max;
        }
    }
    let v = &eig.eigenvectors;
    let mut scaled_v = v.clone();
    for (mut col, &l) in scaled_v.column_iter_mut().zip(&values) {
        col.scale_mut(l);
    }
    let mut cov = scaled_v * v.transpose();
    symmetrize(&mut cov);
    model.covariance = cov;
    model.factor = None;
    model.jitter_applied = 0.0;
    (model, EedaOutcome::Scaled)
}
