//! Run summaries and the two-sided Mann-Whitney U test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub mean: f64,
    /// Sample standard deviation (divisor `k - 1`); 0 for a single value.
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

pub fn summarize(values: &[f64]) -> Result<SampleSummary> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let k = values.len();
    let mean = values.iter().sum::<f64>() / k as f64;
    let std_dev = if k > 1 {
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (k - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(SampleSummary {
        mean,
        std_dev,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        count: k,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UTestMethod {
    Exact,
    NormalApprox,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UTestResult {
    /// U of the first sample: pairs `(a, b)` with `a > b`, ties counting one half.
    pub u_statistic: f64,
    pub p_two_tailed: f64,
    pub method: UTestMethod,
}

/// Largest combined sample size for which the exact null distribution is used.
pub const EXACT_LIMIT: usize = 16;

/// Midranks of `a ++ b` (1-based) and the tie-correction term `sum(t^3 - t)`.
fn midranks(a: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let mut pooled: Vec<(f64, usize)> = a.iter().chain(b).copied().zip(0..).collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for p in &pooled[i..j] {
            ranks[p.1] = rank;
        }
        let t = (j - i) as f64;
        ties += t * t * t - t;
        i = j;
    }
    (ranks, ties)
}

/// Chooses exact enumeration when `|a| + |b| <= EXACT_LIMIT` and there are no
/// ties, and the normal approximation otherwise.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<UTestResult> {
    let (_, ties) = check_and_rank(a, b)?;
    let method = if a.len() + b.len() <= EXACT_LIMIT && ties == 0.0 {
        UTestMethod::Exact
    } else {
        UTestMethod::NormalApprox
    };
    mann_whitney_u_with(a, b, method)
}

fn check_and_rank(a: &[f64], b: &[f64]) -> Result<(Vec<f64>, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(midranks(a, b))
}

/// Runs the test with a fixed method. Under ties the exact method enumerates
/// the null distribution of the untied statistic.
pub fn mann_whitney_u_with(a: &[f64], b: &[f64], method: UTestMethod) -> Result<UTestResult> {
    let (ranks, ties) = check_and_rank(a, b)?;
    let (na, nb) = (a.len(), b.len());
    let rank_sum: f64 = ranks[..na].iter().sum();
    let u = rank_sum - (na * (na + 1)) as f64 / 2.0;
    let p = match method {
        UTestMethod::Exact => exact_p(u, na, nb),
        UTestMethod::NormalApprox => normal_p(u, na, nb, ties),
    };
    Ok(UTestResult {
        u_statistic: u,
        p_two_tailed: p,
        method,
    })
}

/// Counts of rank arrangements by U, via the recurrence
/// `N(u; i, j) = N(u - j; i - 1, j) + N(u; i, j - 1)`.
fn u_distribution(na: usize, nb: usize) -> Vec<f64> {
    let max_u = na * nb;
    // table[i][j] is the count vector for sizes (i, j)
    let mut table = vec![vec![Vec::<f64>::new(); nb + 1]; na + 1];
    for (i, row) in table.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if i == 0 || j == 0 {
                *cell = vec![1.0];
            }
        }
    }
    for i in 1..=na {
        for j in 1..=nb {
            let mut counts = vec![0.0; i * j + 1];
            for (u, c) in table[i - 1][j].iter().enumerate() {
                counts[u + j] += c;
            }
            for (u, c) in table[i][j - 1].iter().enumerate() {
                counts[u] += c;
            }
            table[i][j] = counts;
        }
    }
    let dist = std::mem::take(&mut table[na][nb]);
    debug_assert_eq!(dist.len(), max_u + 1);
    dist
}

fn exact_p(u: f64, na: usize, nb: usize) -> f64 {
    let dist = u_distribution(na, nb);
    let total: f64 = dist.iter().sum();
    let (mut lower, mut upper) = (0.0, 0.0);
    for (k, c) in dist.iter().enumerate() {
        let k = k as f64;
        if k <= u + 1e-9 {
            lower += c;
        }
        if k >= u - 1e-9 {
            upper += c;
        }
    }
    (2.0 * lower.min(upper) / total).min(1.0)
}

fn normal_p(u: f64, na: usize, nb: usize, ties: f64) -> f64 {
    let (na, nb) = (na as f64, nb as f64);
    let n = na + nb;
    let mean = na * nb / 2.0;
    let var = na * nb / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let diff = (u - mean).abs();
    let z = (diff - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::standard();
    (2.0 * normal.sf(z)).min(1.0)
}

/// `§` below 0.001, `†` below 0.01, `*` below 0.05.
pub fn significance_marker(p: f64) -> &'static str {
    if p < 0.001 {
        "§"
    } else if p < 0.01 {
        "†"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// ASCII variant of [`significance_marker`].
pub fn significance_marker_ascii(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_three() {
        let s = summarize(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.std_dev, 1.0);
        assert_eq!((s.min, s.max, s.count), (1.0, 3.0, 3));
        assert_eq!(summarize(&[4.0]).unwrap().std_dev, 0.0);
        assert!(matches!(summarize(&[]), Err(Error::EmptySample)));
    }

    #[test]
    fn separated_pairs() {
        let r = mann_whitney_u(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(r.method, UTestMethod::Exact);
        assert_eq!(r.u_statistic, 0.0);
        assert!((r.p_two_tailed - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn identical_samples_give_p_one() {
        let r = mann_whitney_u(&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(r.method, UTestMethod::NormalApprox);
        assert_eq!(r.p_two_tailed, 1.0);
        assert_eq!(r.u_statistic, 4.5);
    }

    #[test]
    fn large_separated_samples_are_significant() {
        let a: Vec<f64> = (0..25).map(f64::from).collect();
        let b: Vec<f64> = (100..125).map(f64::from).collect();
        let r = mann_whitney_u(&a, &b).unwrap();
        assert_eq!(r.method, UTestMethod::NormalApprox);
        assert!(r.p_two_tailed < 1e-6);
        assert_eq!(significance_marker(r.p_two_tailed), "§");
    }

    #[test]
    fn distribution_sums_to_binomial() {
        let d = u_distribution(4, 6);
        assert_eq!(d.iter().sum::<f64>(), 210.0);
        assert_eq!(d.len(), 25);
        // symmetric about na*nb/2
        for k in 0..d.len() {
            assert_eq!(d[k], d[d.len() - 1 - k]);
        }
    }

    #[test]
    fn markers() {
        assert_eq!(significance_marker(0.0005), "§");
        assert_eq!(significance_marker(0.005), "†");
        assert_eq!(significance_marker(0.03), "*");
        assert_eq!(significance_marker(0.05), "");
        assert_eq!(significance_marker_ascii(0.0005), "***");
        assert_eq!(significance_marker_ascii(0.005), "**");
    }

    #[test]
    fn empty_sample_rejected() {
        assert!(mann_whitney_u(&[], &[1.0]).is_err());
    }
}
