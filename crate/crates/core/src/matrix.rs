//! Validated matrix and vector types.

use num_complex::Complex64;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Absolute tolerance on `|sum - 1|` for simplex points.
pub const SIMPLEX_SUM_TOL: f64 = 1e-12;
/// Below this modulus a coordinate sum counts as zero.
pub const ZERO_SUM_TOL: f64 = 1e-14;
/// Pre-normalization floor used by [`random_simplex_vector`], per unit of dimension.
pub const SIMPLEX_FLOOR: f64 = 1e-6;

/// An `n x n` matrix with strictly positive, finite entries, `n >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositiveMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl PositiveMatrix {
    /// Validates a row-major grid. Entries are stored unchanged.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            let len = row.as_ref().len();
            if len != n {
                return Err(Error::NonSquare {
                    row: i,
                    len,
                    expected: n,
                });
            }
        }
        if n < 2 {
            return Err(Error::TooSmall { n });
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            for (j, &value) in row.as_ref().iter().enumerate() {
                if !value.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
                if value <= 0.0 {
                    return Err(Error::NonPositiveEntry {
                        row: i,
                        col: j,
                        value,
                    });
                }
                entries.push(value);
            }
        }
        Ok(Self { n, entries })
    }

    /// Same as [`from_rows`](Self::from_rows) for a flat row-major buffer.
    pub fn from_row_major(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::NonSquare {
                row: 0,
                len: entries.len(),
                expected: n * n,
            });
        }
        let rows: Vec<&[f64]> = if n == 0 {
            Vec::new()
        } else {
            entries.chunks(n).collect()
        };
        Self::from_rows(&rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Smallest entry `m`.
    pub fn min_entry(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest entry `M`.
    pub fn max_entry(&self) -> f64 {
        self.entries
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> f64 {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[x * n + k].abs().total_cmp(&a[y * n + k].abs()))
                .unwrap_or(k);
            if a[p * n + k] == 0.0 {
                return 0.0;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        det
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, x.len())?;
        Ok((0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn mul_vec_complex(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        check_dim(self.n, x.len())?;
        Ok((0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| b * a).sum())
            .collect())
    }

    /// `c * A` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::from_row_major(self.n, self.entries.iter().map(|a| a * c).collect())
    }

    /// `diag(row) * A * diag(col)`.
    pub fn diag_scaled(&self, row: &[f64], col: &[f64]) -> Result<Self> {
        check_dim(self.n, row.len())?;
        check_dim(self.n, col.len())?;
        let n = self.n;
        let entries = (0..n * n)
            .map(|k| row[k / n] * self.entries[k] * col[k % n])
            .collect();
        Self::from_row_major(n, entries)
    }

    /// Canonical CSV: one row per line, shortest round-trip decimals, trailing newline.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.entries.chunks(self.n) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

pub(crate) fn check_dim(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}

/// A point of the open simplex: positive coordinates summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexVector {
    coords: Vec<f64>,
}

impl SimplexVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        for (i, &c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFiniteEntry { row: i, col: 0 });
            }
            if c <= 0.0 {
                return Err(Error::NonPositiveEntry {
                    row: i,
                    col: 0,
                    value: c,
                });
            }
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { coords })
    }

    pub fn barycenter(n: usize) -> Self {
        Self {
            coords: vec![1.0 / n as f64; n],
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn to_complex(&self) -> ComplexSimplexVector {
        ComplexSimplexVector {
            coords: self
                .coords
                .iter()
                .map(|&c| Complex64::new(c, 0.0))
                .collect(),
        }
    }
}

/// A point of the complex affine simplex: coordinates summing to `1 + 0i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexSimplexVector {
    coords: Vec<Complex64>,
}

impl ComplexSimplexVector {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        let sum: Complex64 = coords.iter().sum();
        if (sum.re - 1.0).abs() > SIMPLEX_SUM_TOL || sum.im.abs() > SIMPLEX_SUM_TOL {
            return Err(Error::NotNormalized { sum: sum.norm() });
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

impl From<&SimplexVector> for ComplexSimplexVector {
    fn from(v: &SimplexVector) -> Self {
        v.to_complex()
    }
}

/// `w / sum(w)` for a positive vector.
pub fn normalize(w: &[f64]) -> Result<SimplexVector> {
    for (i, &c) in w.iter().enumerate() {
        if !c.is_finite() {
            return Err(Error::NonFiniteEntry { row: i, col: 0 });
        }
        if c <= 0.0 {
            return Err(Error::NonPositiveEntry {
                row: i,
                col: 0,
                value: c,
            });
        }
    }
    let sum: f64 = w.iter().sum();
    if !sum.is_finite() {
        return Err(Error::NotNormalized { sum });
    }
    Ok(SimplexVector {
        coords: w.iter().map(|c| c / sum).collect(),
    })
}

/// `w / sum(w)` for a complex vector with non-vanishing sum.
pub fn normalize_complex(w: &[Complex64]) -> Result<ComplexSimplexVector> {
    let sum: Complex64 = w.iter().sum();
    let modulus = sum.norm();
    if modulus.is_nan() || modulus <= ZERO_SUM_TOL || !modulus.is_finite() {
        return Err(Error::ZeroSum { modulus });
    }
    Ok(ComplexSimplexVector {
        coords: w.iter().map(|c| c / sum).collect(),
    })
}

/// Entries i.i.d. uniform on `[lo, hi]`.
pub fn random_positive_matrix(n: usize, lo: f64, hi: f64, seed: u64) -> Result<PositiveMatrix> {
    if n < 2 {
        return Err(Error::TooSmall { n });
    }
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return Err(Error::BadRange { lo, hi });
    }
    let mut rng = rng::from_seed(seed);
    let entries = (0..n * n).map(|_| rng.gen_range(lo..=hi)).collect();
    PositiveMatrix::from_row_major(n, entries)
}

/// Uniform draws on `[n * 1e-6, 1]`, normalized. Every coordinate of the
/// result is at least `1e-6`.
pub fn random_simplex_vector(n: usize, seed: u64) -> Result<SimplexVector> {
    if n < 2 {
        return Err(Error::TooSmall { n });
    }
    let mut rng = rng::from_seed(seed);
    let floor = SIMPLEX_FLOOR * n as f64;
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(floor..1.0)).collect();
    normalize(&raw)
}

/// Samples `w` in the complex `eps`-neighborhood of `v`, with `v` itself as
/// the witness: `|w_i - v_i| <= eps * v_i` for every `i`.
///
/// Offsets are drawn uniformly from disks of radius `eps * v_i / 2`, then the
/// residual `1 - sum(u)` (of modulus at most `eps / 2`) is spread along `v`.
pub fn random_complex_perturbation(
    v: &SimplexVector,
    eps: f64,
    seed: u64,
) -> Result<ComplexSimplexVector> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::BadEpsilon { eps });
    }
    let mut rng = rng::from_seed(seed);
    let u: Vec<Complex64> = v
        .coords()
        .iter()
        .map(|&vi| {
            let radius = 0.5 * eps * vi * rng.gen::<f64>().sqrt();
            let angle = std::f64::consts::TAU * rng.gen::<f64>();
            Complex64::new(vi, 0.0) + Complex64::from_polar(radius, angle)
        })
        .collect();
    let residual = Complex64::new(1.0, 0.0) - u.iter().sum::<Complex64>();
    let coords = u
        .iter()
        .zip(v.coords())
        .map(|(ui, &vi)| ui + residual * vi)
        .collect();
    ComplexSimplexVector::new(coords)
}
