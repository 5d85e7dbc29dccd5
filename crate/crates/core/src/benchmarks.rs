//! The thirteen test functions F1 to F13 and their shift/rotation transforms.
//!
//! | id  | function                                   | domain        |
//! |-----|--------------------------------------------|---------------|
//! | F1  | sphere                                     | `[-100,100]`  |
//! | F2  | shifted sphere                             | `[-100,100]`  |
//! | F3  | Schwefel 2.21, `max |x_i|`                 | `[-100,100]`  |
//! | F4  | shifted F3                                 | `[-100,100]`  |
//! | F5  | Schwefel, `sum (x_1 - x_i^2)^2 + (x_i-1)^2` | `[-10,10]`    |
//! | F6  | shifted F5                                 | `[-10,10]`    |
//! | F7  | Rosenbrock                                 | `[-100,100]`  |
//! | F8  | shifted Rosenbrock                         | `[-100,100]`  |
//! | F9  | shifted rotated high-conditioned elliptic  | `[-100,100]`  |
//! | F10 | Schwefel 2.6, optimum on the bounds        | `[-100,100]`  |
//! | F11 | Rastrigin                                  | `[-5,5]`      |
//! | F12 | shifted rotated Rastrigin                  | `[-5,5]`      |
//! | F13 | shifted expanded Griewank of Rosenbrock    | `[-3,1]`      |
//!
//! Every function adds `bias` to its value, so `optimum_value == bias`.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::engine::Objective;
use crate::error::{Error, Result};
use crate::population::Bounds;
use crate::rng::derive_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FunctionId {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    F8,
    F9,
    F10,
    F11,
    F12,
    F13,
}

impl FunctionId {
    pub const ALL: [FunctionId; 13] = [
        FunctionId::F1,
        FunctionId::F2,
        FunctionId::F3,
        FunctionId::F4,
        FunctionId::F5,
        FunctionId::F6,
        FunctionId::F7,
        FunctionId::F8,
        FunctionId::F9,
        FunctionId::F10,
        FunctionId::F11,
        FunctionId::F12,
        FunctionId::F13,
    ];

    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn domain(self) -> (f64, f64) {
        use FunctionId::*;
        match self {
            F5 | F6 => (-10.0, 10.0),
            F11 | F12 => (-5.0, 5.0),
            F13 => (-3.0, 1.0),
            _ => (-100.0, 100.0),
        }
    }

    pub fn is_shifted(self) -> bool {
        use FunctionId::*;
        matches!(self, F2 | F4 | F6 | F8 | F9 | F10 | F12 | F13)
    }

    pub fn is_rotated(self) -> bool {
        matches!(self, FunctionId::F9 | FunctionId::F12)
    }

    /// Functions whose shift enters as `z = x - o + 1`.
    fn shift_plus_one(self) -> bool {
        matches!(self, FunctionId::F6 | FunctionId::F8 | FunctionId::F13)
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.number())
    }
}

impl FromStr for FunctionId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let num = s
            .strip_prefix('F')
            .or_else(|| s.strip_prefix('f'))
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|k| (1..=13).contains(k))
            .ok_or_else(|| format!("unknown problem {s:?}; expected F1..F13"))?;
        Ok(FunctionId::ALL[num - 1])
    }
}

/// A concrete, immutable problem instance.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkProblem {
    pub id: FunctionId,
    pub n: usize,
    pub bounds: Bounds,
    pub shift: Option<Vec<f64>>,
    pub rotation: Option<DMatrix<f64>>,
    pub bias: f64,
    /// `(A, B)` for F10, with `B = A o`.
    pub linear_system: Option<(DMatrix<f64>, Vec<f64>)>,
    pub optimum_value: f64,
}

fn dot(a: impl Iterator<Item = f64>, b: &[f64]) -> f64 {
    a.zip(b).map(|(x, y)| x * y).sum()
}

fn rosenbrock_2d(x: f64, y: f64) -> f64 {
    100.0 * (x * x - y).powi(2) + (x - 1.0).powi(2)
}

fn griewank_1d(x: f64) -> f64 {
    x * x / 4000.0 - x.cos() + 1.0
}

impl BenchmarkProblem {
    /// Untransformed problem with the given transforms; no validation beyond sizes.
    fn assemble(
        id: FunctionId,
        n: usize,
        shift: Option<Vec<f64>>,
        rotation: Option<DMatrix<f64>>,
        linear_system: Option<(DMatrix<f64>, Vec<f64>)>,
        bias: f64,
    ) -> Result<Self> {
        let (lo, hi) = id.domain();
        Ok(Self {
            id,
            n,
            bounds: Bounds::uniform(n, lo, hi)?,
            shift,
            rotation,
            bias,
            linear_system,
            optimum_value: bias,
        })
    }

    /// A known global minimizer.
    pub fn optimizer(&self) -> Vec<f64> {
        match (&self.shift, self.id) {
            (Some(o), _) => o.clone(),
            (None, FunctionId::F5 | FunctionId::F7) => vec![1.0; self.n],
            (None, _) => vec![0.0; self.n],
        }
    }

    fn transformed(&self, x: &[f64]) -> Vec<f64> {
        let mut z: Vec<f64> = match &self.shift {
            Some(o) => x.iter().zip(o).map(|(a, b)| a - b).collect(),
            None => x.to_vec(),
        };
        if let Some(m) = &self.rotation {
            // row vector times M
            let d = DVector::from_vec(z);
            z = m.tr_mul(&d).data.into();
        }
        if self.shift.is_some() && self.id.shift_plus_one() {
            for v in &mut z {
                *v += 1.0;
            }
        }
        z
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(self.value_unchecked(x))
    }

    fn value_unchecked(&self, x: &[f64]) -> f64 {
        use FunctionId::*;
        let n = self.n;
        let core = match self.id {
            F10 => {
                let (a, b) = self
                    .linear_system
                    .as_ref()
                    .expect("F10 instance carries its linear system");
                (0..n)
                    .map(|i| (dot(a.row(i).iter().copied(), x) - b[i]).abs())
                    .fold(0.0, f64::max)
            }
            _ => {
                let z = self.transformed(x);
                match self.id {
                    F1 | F2 => z.iter().map(|v| v * v).sum(),
                    F3 | F4 => z.iter().map(|v| v.abs()).fold(0.0, f64::max),
                    F5 | F6 => z
                        .iter()
                        .map(|&zi| (z[0] - zi * zi).powi(2) + (zi - 1.0).powi(2))
                        .sum(),
                    F7 | F8 => z.windows(2).map(|w| rosenbrock_2d(w[0], w[1])).sum(),
                    F9 => z
                        .iter()
                        .enumerate()
                        .map(|(i, v)| 1e6f64.powf(i as f64 / (n - 1) as f64) * v * v)
                        .sum(),
                    F11 | F12 => z
                        .iter()
                        .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
                        .sum(),
                    F13 => (0..n)
                        .map(|i| griewank_1d(rosenbrock_2d(z[i], z[(i + 1) % n])))
                        .sum(),
                    F10 => unreachable!(),
                }
            }
        };
        core + self.bias
    }
}

impl Objective for BenchmarkProblem {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.value_unchecked(x)
    }
}

/// Where an instance's transforms come from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransformSource {
    Seeded(u64),
    /// Directory holding `<problem>_<n>D_{shift|rot|A|B}.txt` files.
    Directory(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstanceSpec {
    pub id: FunctionId,
    pub n: usize,
    pub source: TransformSource,
    pub bias: Option<f64>,
}

impl ProblemInstanceSpec {
    pub fn seeded(id: FunctionId, n: usize, seed: u64) -> Self {
        Self {
            id,
            n,
            source: TransformSource::Seeded(seed),
            bias: None,
        }
    }
}

/// Builds a problem instance from its spec.
pub fn instantiate(spec: &ProblemInstanceSpec) -> Result<BenchmarkProblem> {
    let bias = spec.bias.unwrap_or(0.0);
    match &spec.source {
        TransformSource::Seeded(seed) => {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(&[*seed, spec.id.number() as u64, spec.n as u64]));
            instantiate_with_rng(spec.id, spec.n, bias, &mut rng)
        }
        TransformSource::Directory(dir) => load_instance(spec.id, spec.n, bias, dir),
    }
}

fn check_dimension(id: FunctionId, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::ProblemTooSmall {
            id: id.to_string(),
            n,
            min: 2,
        });
    }
    Ok(())
}

/// Generates shift, rotation and linear system for `id` from `rng`.
pub fn instantiate_with_rng<R: Rng + ?Sized>(
    id: FunctionId,
    n: usize,
    bias: f64,
    rng: &mut R,
) -> Result<BenchmarkProblem> {
    check_dimension(id, n)?;
    let (lo, hi) = id.domain();
    let mut shift = None;
    let mut linear_system = None;

    if id == FunctionId::F10 {
        let quarter = n.div_ceil(4);
        let mut o: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
        for v in &mut o[..quarter] {
            *v = lo;
        }
        for v in &mut o[n - quarter..] {
            *v = hi;
        }
        let a = loop {
            let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-500i32..=500) as f64);
            if well_conditioned(&a) {
                break a;
            }
        };
        let b = (0..n).map(|i| dot(a.row(i).iter().copied(), &o)).collect();
        shift = Some(o);
        linear_system = Some((a, b));
    } else if id.is_shifted() {
        let center = 0.5 * (lo + hi);
        let half = 0.4 * (hi - lo);
        shift = Some((0..n).map(|_| rng.random_range(center - half..=center + half)).collect());
    }

    let rotation = if id.is_rotated() {
        Some(generate_rotation(n, rng))
    } else {
        None
    };
    BenchmarkProblem::assemble(id, n, shift, rotation, linear_system, bias)
}

/// Smallest-to-largest LU pivot ratio accepted for the F10 matrix.
const MIN_PIVOT_RATIO: f64 = 1e-8;

fn well_conditioned(a: &DMatrix<f64>) -> bool {
    let lu = a.clone().lu();
    let u = lu.u();
    let pivots: Vec<f64> = u.diagonal().iter().map(|v| v.abs()).collect();
    let max = pivots.iter().copied().fold(0.0, f64::max);
    let min = pivots.iter().copied().fold(f64::INFINITY, f64::min);
    max > 0.0 && min >= MIN_PIVOT_RATIO * max
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `R`'s diagonal folded into `Q`.
pub fn generate_rotation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < 0.0 {
            col.neg_mut();
        }
    }
    q
}

/// `||M M^T - I||_F`.
pub fn orthogonality_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    (m * m.transpose() - DMatrix::identity(n, n)).norm()
}

pub const ROTATION_TOLERANCE: f64 = 1e-6;

/// File name for one transform of a problem, e.g. `F9_50D_rot.txt`.
pub fn transform_file_name(id: FunctionId, n: usize, kind: TransformKind) -> String {
    format!("{id}_{n}D_{}.txt", kind.suffix())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformKind {
    Shift,
    Rotation,
    MatrixA,
    VectorB,
}

impl TransformKind {
    fn suffix(self) -> &'static str {
        match self {
            TransformKind::Shift => "shift",
            TransformKind::Rotation => "rot",
            TransformKind::MatrixA => "A",
            TransformKind::VectorB => "B",
        }
    }
}

/// Reads whitespace-separated decimals.
pub fn load_transforms(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    text.split_whitespace()
        .enumerate()
        .map(|(index, tok)| {
            tok.parse::<f64>().map_err(|_| Error::TransformParse {
                path: path.to_owned(),
                index,
                token: tok.to_owned(),
            })
        })
        .collect()
}

fn expect_len(path: &Path, values: &[f64], expected: usize) -> Result<()> {
    if values.len() != expected {
        return Err(Error::TransformSize {
            path: path.to_owned(),
            expected,
            found: values.len(),
        });
    }
    Ok(())
}

pub fn load_vector(path: &Path, n: usize) -> Result<Vec<f64>> {
    let v = load_transforms(path)?;
    expect_len(path, &v, n)?;
    Ok(v)
}

/// Reads a row-major `n x n` matrix.
pub fn load_matrix(path: &Path, n: usize) -> Result<DMatrix<f64>> {
    let v = load_transforms(path)?;
    expect_len(path, &v, n * n)?;
    Ok(DMatrix::from_row_slice(n, n, &v))
}

/// Reads a rotation and checks `||M M^T - I||_F <= ROTATION_TOLERANCE`.
pub fn load_rotation(path: &Path, n: usize) -> Result<DMatrix<f64>> {
    let m = load_matrix(path, n)?;
    let deviation = orthogonality_defect(&m);
    if deviation.is_nan() || deviation > ROTATION_TOLERANCE {
        return Err(Error::NotOrthogonal {
            path: path.to_owned(),
            deviation,
        });
    }
    Ok(m)
}

fn write_rows(path: &Path, rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_owned(),
        source,
    };
    let mut out = std::io::BufWriter::new(fs::File::create(path).map_err(io)?);
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", line.join(" ")).map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    write_rows(path, std::iter::once(v.to_vec()))
}

/// Writes a matrix row-major, one row per line.
pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    write_rows(path, m.row_iter().map(|r| r.iter().copied().collect()))
}

/// Writes every transform of `problem` into `dir` using the standard names.
pub fn export_transforms(problem: &BenchmarkProblem, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_owned(),
        source,
    })?;
    let name = |kind| dir.join(transform_file_name(problem.id, problem.n, kind));
    let mut written = Vec::new();
    if let Some(o) = &problem.shift {
        let p = name(TransformKind::Shift);
        write_vector(&p, o)?;
        written.push(p);
    }
    if let Some(m) = &problem.rotation {
        let p = name(TransformKind::Rotation);
        write_matrix(&p, m)?;
        written.push(p);
    }
    if let Some((a, b)) = &problem.linear_system {
        let p = name(TransformKind::MatrixA);
        write_matrix(&p, a)?;
        written.push(p);
        let p = name(TransformKind::VectorB);
        write_vector(&p, b)?;
        written.push(p);
    }
    Ok(written)
}

fn load_instance(id: FunctionId, n: usize, bias: f64, dir: &Path) -> Result<BenchmarkProblem> {
    check_dimension(id, n)?;
    let name = |kind| dir.join(transform_file_name(id, n, kind));
    let shift = if id.is_shifted() {
        Some(load_vector(&name(TransformKind::Shift), n)?)
    } else {
        None
    };
    let rotation = if id.is_rotated() {
        Some(load_rotation(&name(TransformKind::Rotation), n)?)
    } else {
        None
    };
    let linear_system = if id == FunctionId::F10 {
        let a = load_matrix(&name(TransformKind::MatrixA), n)?;
        let b_path = name(TransformKind::VectorB);
        let b = if b_path.exists() {
            load_vector(&b_path, n)?
        } else {
            let o = shift.as_ref().expect("F10 is shifted");
            (0..n).map(|i| dot(a.row(i).iter().copied(), o)).collect()
        };
        Some((a, b))
    } else {
        None
    };
    BenchmarkProblem::assemble(id, n, shift, rotation, linear_system, bias)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(id: FunctionId, n: usize) -> BenchmarkProblem {
        instantiate(&ProblemInstanceSpec::seeded(id, n, 1)).unwrap()
    }

    #[test]
    fn unshifted_values() {
        assert_eq!(plain(FunctionId::F1, 4).evaluate(&[0.0; 4]).unwrap(), 0.0);
        let f7 = plain(FunctionId::F7, 2);
        assert_eq!(f7.evaluate(&[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(f7.evaluate(&[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(plain(FunctionId::F3, 3).evaluate(&[3.0, -7.0, 2.0]).unwrap(), 7.0);
        assert_eq!(plain(FunctionId::F11, 5).evaluate(&[0.0; 5]).unwrap(), 0.0);
        assert_eq!(plain(FunctionId::F5, 5).evaluate(&[1.0; 5]).unwrap(), 0.0);
    }

    #[test]
    fn f1_has_no_transforms() {
        let p = plain(FunctionId::F1, 10);
        assert!(p.shift.is_none() && p.rotation.is_none() && p.linear_system.is_none());
        assert_eq!(p.optimum_value, 0.0);
    }

    #[test]
    fn shifted_functions_vanish_at_shift_plus_bias() {
        for id in FunctionId::ALL.into_iter().filter(|id| id.is_shifted()) {
            let mut spec = ProblemInstanceSpec::seeded(id, 10, 5);
            spec.bias = Some(-140.0);
            let p = instantiate(&spec).unwrap();
            let o = p.shift.clone().unwrap();
            let v = p.evaluate(&o).unwrap();
            assert!((v - (-140.0)).abs() <= 1e-9, "{id}: {v}");
        }
    }

    #[test]
    fn f10_optimum_on_bounds() {
        let p = plain(FunctionId::F10, 9);
        let o = p.shift.as_ref().unwrap();
        let q = 9usize.div_ceil(4);
        assert!(o[..q].iter().all(|&v| v == -100.0));
        assert!(o[9 - q..].iter().all(|&v| v == 100.0));
        assert_eq!(p.evaluate(o).unwrap(), p.bias);
        let (a, _) = p.linear_system.as_ref().unwrap();
        assert!(a.iter().all(|v| v.fract() == 0.0 && v.abs() <= 500.0));
    }

    #[test]
    fn shifts_stay_interior() {
        for id in [FunctionId::F2, FunctionId::F6, FunctionId::F13] {
            let p = plain(id, 50);
            let (lo, hi) = id.domain();
            let margin = 0.1 * (hi - lo);
            assert!(p
                .shift
                .unwrap()
                .iter()
                .all(|&v| v >= lo + margin - 1e-12 && v <= hi - margin + 1e-12));
        }
    }

    #[test]
    fn seeded_instances_are_reproducible() {
        let a = plain(FunctionId::F12, 8);
        let b = plain(FunctionId::F12, 8);
        assert_eq!(a, b);
        let c = instantiate(&ProblemInstanceSpec::seeded(FunctionId::F12, 8, 2)).unwrap();
        assert_ne!(a.shift, c.shift);
    }

    #[test]
    fn rotation_is_orthogonal_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 5, 30] {
            let m = generate_rotation(n, &mut rng);
            assert!(orthogonality_defect(&m) <= 1e-8);
            let v = DVector::from_fn(n, |i, _| i as f64 - 1.5);
            assert!(((&m * &v).norm() - v.norm()).abs() <= 1e-10);
        }
    }

    #[test]
    fn dimension_checks() {
        let p = plain(FunctionId::F1, 3);
        assert!(matches!(p.evaluate(&[0.0; 2]), Err(Error::DimensionMismatch { .. })));
        assert!(instantiate(&ProblemInstanceSpec::seeded(FunctionId::F13, 1, 0)).is_err());
    }

    #[test]
    fn f13_wraps_last_pair() {
        // z = x - o + 1; with o = 0 the pair (x_n, x_1) contributes
        let mut p = plain(FunctionId::F13, 3);
        p.shift = Some(vec![0.0; 3]);
        let x = [0.0, 0.0, 0.5];
        let z: Vec<f64> = x.iter().map(|v| v + 1.0).collect();
        let want: f64 = [(z[0], z[1]), (z[1], z[2]), (z[2], z[0])]
            .iter()
            .map(|&(a, b)| griewank_1d(rosenbrock_2d(a, b)))
            .sum();
        assert!((p.evaluate(&x).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn parse_function_ids() {
        assert_eq!("F10".parse::<FunctionId>().unwrap(), FunctionId::F10);
        assert_eq!("f3".parse::<FunctionId>().unwrap(), FunctionId::F3);
        assert!("F14".parse::<FunctionId>().is_err());
        assert!("G1".parse::<FunctionId>().is_err());
    }
}
