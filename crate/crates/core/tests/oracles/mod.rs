//! Independent reference implementations, written with plain loops and no
//! linear-algebra library, used to check the library routines.
#![allow(dead_code)]

use edamcc::benchmarks::BenchmarkProblem;
use edamcc::FunctionId;

pub type Mat = Vec<Vec<f64>>;

pub fn from_rows(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Mat {
    (0..rows).map(|i| (0..cols).map(|j| f(i, j)).collect()).collect()
}

pub fn frobenius(a: &Mat) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn mul_transpose(h: &Mat) -> Mat {
    let n = h.len();
    from_rows(n, n, |i, j| (0..n).map(|k| h[i][k] * h[j][k]).sum())
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Returns eigenvalues and eigenvectors as columns of `v`.
pub fn jacobi_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.len();
    let mut a = a.clone();
    let mut v = from_rows(n, n, |i, j| if i == j { 1.0 } else { 0.0 });
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// Minimum eigenvalue(s) raised to the maximum, rebuilt as `V diag(l) V^T`.
pub fn eeda_oracle(sigma: &Mat) -> Mat {
    let n = sigma.len();
    let (mut l, v) = jacobi_eigen(sigma);
    let max = l.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for x in l.iter_mut() {
        *x = x.max(1e-12 * max);
    }
    let min = l.iter().copied().fold(f64::INFINITY, f64::min);
    for x in l.iter_mut() {
        if *x - min <= 1e-9 * max {
            *x = max;
        }
    }
    from_rows(n, n, |i, j| (0..n).map(|k| v[i][k] * l[k] * v[j][k]).sum())
}

/// Textbook Pearson coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// ML covariance with divisor `m`.
pub fn covariance(rows: &Mat) -> Mat {
    let m = rows.len() as f64;
    let n = rows[0].len();
    let mean: Vec<f64> = (0..n).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / m).collect();
    from_rows(n, n, |i, j| {
        rows.iter()
            .map(|r| (r[i] - mean[i]) * (r[j] - mean[j]))
            .sum::<f64>()
            / m
    })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// U statistic by direct pair counting.
pub fn u_by_pairs(a: &[f64], b: &[f64]) -> f64 {
    let mut u = 0.0;
    for x in a {
        for y in b {
            if x > y {
                u += 1.0;
            } else if x == y {
                u += 0.5;
            }
        }
    }
    u
}

/// Exact two-tailed p-value by enumerating every split of ranks `1..=na+nb`.
pub fn mwu_enumeration_p(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len(), b.len());
    let u = u_by_pairs(a, b);
    let n = na + nb;
    let splits = combinations(n, na);
    let mut le = 0usize;
    let mut ge = 0usize;
    for chosen in &splits {
        let rank_sum: usize = chosen.iter().map(|i| i + 1).sum();
        let uk = rank_sum as f64 - (na * (na + 1)) as f64 / 2.0;
        if uk <= u {
            le += 1;
        }
        if uk >= u {
            ge += 1;
        }
    }
    let total = splits.len() as f64;
    (2.0 * le.min(ge) as f64 / total).min(1.0)
}

/// Benchmark functions written straight from their textbook definitions.
pub fn naive_value(p: &BenchmarkProblem, x: &[f64]) -> f64 {
    use std::f64::consts::PI;
    use FunctionId::*;
    let n = x.len();
    let mut z = x.to_vec();
    if let Some(o) = &p.shift {
        if p.id != F10 {
            for i in 0..n {
                z[i] = x[i] - o[i];
            }
        }
    }
    if let Some(m) = &p.rotation {
        let d = z.clone();
        for j in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                s += d[i] * m[(i, j)];
            }
            z[j] = s;
        }
    }
    if matches!(p.id, F6 | F8 | F13) {
        for v in z.iter_mut() {
            *v += 1.0;
        }
    }
    let rosen = |a: f64, b: f64| 100.0 * (a * a - b) * (a * a - b) + (a - 1.0) * (a - 1.0);
    let mut f = 0.0;
    match p.id {
        F1 | F2 => {
            for v in &z {
                f += v * v;
            }
        }
        F3 | F4 => {
            for v in &z {
                f = f64::max(f, v.abs());
            }
        }
        F5 | F6 => {
            for i in 0..n {
                let t = z[0] - z[i] * z[i];
                f += t * t + (z[i] - 1.0) * (z[i] - 1.0);
            }
        }
        F7 | F8 => {
            for i in 0..n - 1 {
                f += rosen(z[i], z[i + 1]);
            }
        }
        F9 => {
            for i in 0..n {
                let w = 10f64.powf(6.0 * i as f64 / (n - 1) as f64);
                f += w * z[i] * z[i];
            }
        }
        F10 => {
            let (a, b) = p.linear_system.as_ref().unwrap();
            for i in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    s += a[(i, j)] * x[j];
                }
                f = f64::max(f, (s - b[i]).abs());
            }
        }
        F11 | F12 => {
            for v in &z {
                f += v * v - 10.0 * (2.0 * PI * v).cos() + 10.0;
            }
        }
        F13 => {
            for i in 0..n {
                let r = rosen(z[i], z[(i + 1) % n]);
                f += r * r / 4000.0 - r.cos() + 1.0;
            }
        }
    }
    f + p.bias
}
