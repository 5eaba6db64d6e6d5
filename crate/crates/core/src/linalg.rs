//! Dense linear algebra used throughout the crate.
//!
//! Everything here works on small-to-moderate dense matrices (up to a few
//! thousand sites). The symmetric eigensolver is Householder
//! tridiagonalization followed by implicit QL with Wilkinson-style shifts;
//! null spaces come from one-sided Jacobi, which keeps small singular values
//! accurate to roughly `eps * ||A||`.
#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // float methods come from libm without std
use num_traits::Float;

/// Default cap on the matrix dimension accepted by [`eigh`].
pub const DEFAULT_SIZE_CAP: usize = 4096;

/// Row-major dense real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data. Panics if the length is wrong.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data has wrong length");
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut s = Matrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                s[(a, b)] = self[(i, j)];
            }
        }
        s
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul_vec_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + b * *a)
            })
            .collect()
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|a_ij - a_ji|`; `None` for non-square matrices.
    pub fn asymmetry(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        Some(worst)
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LinalgError {
    NotSquare { rows: usize, cols: usize },
    NotSymmetric { asymmetry: f64 },
    SizeCapExceeded { size: usize, cap: usize },
    NoConvergence { index: usize },
    Singular { pivot_row: usize, pivot: f64 },
    DimensionMismatch { expected: usize, found: usize },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::NotSquare { rows, cols } => {
                write!(f, "matrix is not square ({rows}x{cols})")
            }
            LinalgError::NotSymmetric { asymmetry } => {
                write!(f, "matrix is not symmetric (max |a_ij - a_ji| = {asymmetry:e})")
            }
            LinalgError::SizeCapExceeded { size, cap } => {
                write!(f, "matrix dimension {size} exceeds the cap of {cap}")
            }
            LinalgError::NoConvergence { index } => {
                write!(f, "QL iteration did not converge for eigenvalue {index}")
            }
            LinalgError::Singular { pivot_row, pivot } => {
                write!(f, "singular system: pivot {pivot:e} at row {pivot_row}")
            }
            LinalgError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
        }
    }
}

impl core::error::Error for LinalgError {}

/// Eigen-decomposition of a real symmetric matrix.
///
/// Energies are ascending; `vector(i)` is the unit eigenvector belonging to
/// `values[i]`, with the sign fixed so that its first significant component is
/// positive.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    n: usize,
    vectors: Vec<f64>,
}

impl SymmetricEigen {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.n..(i + 1) * self.n]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> {
        self.vectors.chunks_exact(self.n.max(1)).take(self.n)
    }
}

/// Symmetric eigensolver with the default size cap.
pub fn eigh(a: &Matrix) -> Result<SymmetricEigen, LinalgError> {
    eigh_with_cap(a, DEFAULT_SIZE_CAP)
}

pub fn eigh_with_cap(a: &Matrix, cap: usize) -> Result<SymmetricEigen, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if n > cap {
        return Err(LinalgError::SizeCapExceeded { size: n, cap });
    }
    let asym = a.asymmetry().unwrap_or(0.0);
    if asym > 1e-12 * a.max_abs().max(1.0) {
        return Err(LinalgError::NotSymmetric { asymmetry: asym });
    }
    if n == 0 {
        return Ok(SymmetricEigen {
            values: Vec::new(),
            n: 0,
            vectors: Vec::new(),
        });
    }

    let mut v = a.data.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(n, &mut v, &mut d, &mut e);

    // Work on the transpose so each eigenvector is a contiguous row while
    // the QL rotations are applied.
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            z[i * n + k] = v[k * n + i];
        }
    }
    tql(n, &mut d, &mut e, &mut z)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(core::cmp::Ordering::Equal));
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * n);
    for &i in &order {
        values.push(d[i]);
        let row = &z[i * n..(i + 1) * n];
        let scale = row.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let sign = row
            .iter()
            .find(|x| x.abs() > 1e-8 * scale)
            .map_or(1.0, |x| x.signum());
        vectors.extend(row.iter().map(|x| sign * x));
    }
    Ok(SymmetricEigen { values, n, vectors })
}

/// Householder reduction to tridiagonal form (EISPACK tred2 ordering).
/// On exit `d` holds the diagonal, `e[1..]` the subdiagonal and `v` the
/// accumulated orthogonal transform, row-major.
fn tridiagonalize(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let idx = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
                v[idx(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                g = e[j] + v[idx(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[idx(k, j)] * d[k];
                    e[k] += v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[idx(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    v[idx(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = 0.0;
    }
    v[idx(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal (d, e). `z` rows are eigenvectors.
fn tql(n: usize, d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<(), LinalgError> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let max_iter = 60;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(LinalgError::NoConvergence { index: l });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (lo, hi) = z.split_at_mut((i + 1) * n);
                    let zi = &mut lo[i * n..];
                    let zi1 = &mut hi[..n];
                    for k in 0..n {
                        let t = zi1[k];
                        zi1[k] = s * zi[k] + c * t;
                        zi[k] = c * zi[k] - s * t;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// One-sided Jacobi singular value decomposition data: singular values and
/// the right singular vectors (as rows) of a `p x d` matrix.
#[derive(Clone, Debug)]
pub struct RightSingular {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Right singular vectors and singular values of `a` (unsorted, one per
/// column). Rows of `a` may be zero, in which case every singular value is 0.
pub fn right_singular(a: &Matrix) -> RightSingular {
    let p = a.rows();
    let d = a.cols();
    // Columns of `a`, stored contiguously.
    let mut u: Vec<Vec<f64>> = (0..d).map(|j| (0..p).map(|i| a[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..d)
        .map(|j| (0..d).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let eps = f64::EPSILON;
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..d {
            for j in (i + 1)..d {
                let alpha: f64 = u[i].iter().map(|x| x * x).sum();
                let beta: f64 = u[j].iter().map(|x| x * x).sum();
                let gamma: f64 = u[i].iter().zip(&u[j]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..p {
                    let (x, y) = (u[i][k], u[j][k]);
                    u[i][k] = c * x - s * y;
                    u[j][k] = s * x + c * y;
                }
                for k in 0..d {
                    let (x, y) = (v[i][k], v[j][k]);
                    v[i][k] = c * x - s * y;
                    v[j][k] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let values = u
        .iter()
        .map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    RightSingular { values, vectors: v }
}

/// Solves `a x = b` for complex `a` (row-major, n x n) by Gaussian
/// elimination with partial pivoting. A pivot below `rel_tol * max|a|`
/// is reported as singular.
pub fn solve_complex(
    n: usize,
    mut a: Vec<Complex64>,
    mut b: Vec<Complex64>,
    rel_tol: f64,
) -> Result<Vec<Complex64>, LinalgError> {
    if a.len() != n * n {
        return Err(LinalgError::DimensionMismatch {
            expected: n * n,
            found: a.len(),
        });
    }
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let scale = a.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let threshold = rel_tol * scale.max(f64::MIN_POSITIVE);
    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, a[r * n + col].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs <= threshold {
            return Err(LinalgError::Singular {
                pivot_row: col,
                pivot: pivot_abs,
            });
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        let inv = a[col * n + col].inv();
        for r in (col + 1)..n {
            let factor = a[r * n + col] * inv;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in col..n {
                let upd = factor * a[col * n + k];
                a[r * n + k] -= upd;
            }
            let upd = factor * b[col];
            b[r] -= upd;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for k in (r + 1)..n {
            acc -= a[r * n + k] * x[k];
        }
        x[r] = acc / a[r * n + r];
    }
    Ok(x)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}
