//! Dense row-major `f64` matrices and the two numerical primitives the
//! trainers depend on: the Moore-Penrose pseudoinverse and orthonormal
//! range bases.
//!
//! Both primitives go through a thin singular value decomposition
//! ([`Svd`]). Singular values at or below the effective tolerance are
//! treated as zero; the default tolerance is
//! `max(rows, cols) * f64::EPSILON * sigma_max`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense real matrix stored row-major.
///
/// Every entry is finite. Zero rows or zero columns are allowed so that
/// empty batches and rank-zero bases have a representation.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<RawMatrix> for Matrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        Matrix::new(raw.rows, raw.cols, raw.data)
    }
}

impl From<Matrix> for RawMatrix {
    fn from(m: Matrix) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            data: m.data,
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows.min(12) {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        if self.rows > 12 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    /// Builds a matrix from row-major data.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape {
                op: "Matrix::new",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Matrix::new"));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from a slice of equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape {
                    op: "Matrix::from_rows",
                    left: (0, cols),
                    right: (i, r.len()),
                });
            }
            data.extend_from_slice(r);
        }
        Matrix::new(rows.len(), cols, data)
    }

    /// Builds a matrix from equal-length columns.
    pub fn from_columns<C: AsRef<[f64]>>(rows: usize, columns: &[C]) -> Result<Self> {
        let cols = columns.len();
        let mut data = vec![0.0; rows * cols];
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            if c.len() != rows {
                return Err(Error::Shape {
                    op: "Matrix::from_columns",
                    left: (rows, 0),
                    right: (c.len(), j),
                });
            }
            for (i, v) in c.iter().enumerate() {
                data[i * cols + j] = *v;
            }
        }
        Matrix::new(rows, cols, data)
    }

    /// Panics if `f` produces a non-finite value.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = f(r, c);
                assert!(v.is_finite(), "Matrix::from_fn produced {v} at ({r}, {c})");
                data.push(v);
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| if r == c { 1.0 } else { 0.0 })
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let mut data = vec![0.0; n * n];
        for (i, v) in values.iter().enumerate() {
            data[i * n + i] = *v;
        }
        Matrix::new(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        assert!(c < self.cols, "column {c} out of bounds");
        (0..self.rows).map(|r| self.data[r * self.cols + c]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = vec![0.0; self.data.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Shape {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let n = other.cols;
        let mut data = vec![0.0; self.rows * n];
        for (out, lhs) in data.chunks_mut(n.max(1)).zip(self.data.chunks(self.cols.max(1))) {
            if n == 0 {
                break;
            }
            for (k, &a) in lhs.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let rhs = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out.iter_mut().zip(rhs) {
                    *o += a * b;
                }
            }
        }
        Matrix::new(self.rows, n, data).map_err(|_| Error::NonFinite("matmul"))
    }

    /// Entrywise `self - other`.
    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    /// Entrywise `self + other`.
    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    fn zip_with(&self, other: &Matrix, op: &'static str, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.shape() != other.shape() {
            return Err(Error::Shape {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Matrix::new(self.rows, self.cols, data).map_err(|_| Error::NonFinite(op))
    }

    pub fn scale(&self, k: f64) -> Matrix {
        self.map(|v| v * k)
    }

    /// Applies `f` to every entry. Panics if `f` yields a non-finite value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let data: Vec<f64> = self.data.iter().map(|&v| f(v)).collect();
        assert!(data.iter().all(|v| v.is_finite()), "Matrix::map produced a non-finite value");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Largest absolute entry (0 for an empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::Shape {
                op: "hstack",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(Matrix {
            rows: self.rows,
            cols,
            data,
        })
    }

    /// New matrix made of the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// New matrix made of columns `range`.
    pub fn column_range(&self, range: std::ops::Range<usize>) -> Matrix {
        assert!(range.end <= self.cols, "column range out of bounds");
        let cols = range.len();
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(&self.row(r)[range.clone()]);
        }
        Matrix {
            rows: self.rows,
            cols,
            data,
        }
    }

    fn to_faer(&self) -> faer::Mat<f64> {
        faer::Mat::from_fn(self.rows, self.cols, |r, c| self.data[r * self.cols + c])
    }
}

/// Matrix product `a * b`.
pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.matmul(b)
}

/// Thin singular value decomposition `A = U diag(s) Vᵀ` with singular values
/// sorted in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows × k` left singular vectors, `k = min(rows, cols)`.
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    /// `k × cols` right singular vectors (as rows).
    pub vt: Matrix,
    shape: (usize, usize),
}

impl Svd {
    pub fn new(a: &Matrix) -> Result<Svd> {
        if a.is_empty() {
            return Err(Error::config(format!("SVD of an empty {}x{} matrix", a.rows, a.cols)));
        }
        let svd = Svd::factor(a)?;
        if !svd.reproduces(a) {
            return Err(Error::Numerical(format!(
                "SVD of {}x{} matrix failed its consistency check",
                a.rows, a.cols
            )));
        }
        Ok(svd)
    }

    fn factor(a: &Matrix) -> Result<Svd> {
        // sequential so results do not depend on the thread count
        static SEQUENTIAL: std::sync::Once = std::sync::Once::new();
        SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
        let svd = a
            .to_faer()
            .thin_svd()
            .map_err(|e| Error::Numerical(format!("SVD of {}x{} matrix did not converge: {e:?}", a.rows, a.cols)))?;
        let (m, n) = a.shape();
        let k = m.min(n);
        let s = svd.S().column_vector();
        let singular_values: Vec<f64> = (0..k).map(|i| s[i]).collect();
        if singular_values.iter().any(|s| !s.is_finite()) {
            return Err(Error::Numerical("SVD produced non-finite singular values".into()));
        }
        let u = svd.U();
        let v = svd.V();
        let non_finite = || Error::Numerical("SVD produced non-finite factors".into());
        Ok(Svd {
            u: Matrix::new(m, k, (0..m * k).map(|i| u[(i / k, i % k)]).collect()).map_err(|_| non_finite())?,
            singular_values,
            vt: Matrix::new(k, n, (0..k * n).map(|i| v[(i % n, i / n)]).collect()).map_err(|_| non_finite())?,
            shape: a.shape(),
        })
    }

    /// Compares `A x` with `U diag(s) Vᵀ x` for a fixed dense probe `x`.
    fn reproduces(&self, a: &Matrix) -> bool {
        let (m, n) = self.shape;
        let x: Vec<f64> = (0..n).map(|j| ((j + 1) as f64 * 0.754_877_666).sin() + 0.5).collect();
        let coeffs: Vec<f64> = (0..self.singular_values.len())
            .map(|i| dot(self.vt.row(i), &x) * self.singular_values[i])
            .collect();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for r in 0..m {
            let ax = dot(a.row(r), &x);
            worst = worst.max((ax - dot(self.u.row(r), &coeffs)).abs());
            scale = scale.max(ax.abs());
        }
        let smax = self.singular_values.first().copied().unwrap_or(0.0);
        worst <= 1e-8 * (scale + smax * norm(&x))
    }

    /// `max(rows, cols) * eps * sigma_max`.
    pub fn default_tolerance(&self) -> f64 {
        let (m, n) = self.shape;
        let smax = self.singular_values.first().copied().unwrap_or(0.0);
        m.max(n) as f64 * f64::EPSILON * smax
    }

    fn cutoff(&self, tol: Option<f64>) -> f64 {
        tol.unwrap_or_else(|| self.default_tolerance())
    }

    /// Number of singular values strictly above the tolerance.
    pub fn rank(&self, tol: Option<f64>) -> usize {
        let cut = self.cutoff(tol);
        self.singular_values.iter().take_while(|&&s| s > cut).count()
    }

    /// `A†`, shape `cols × rows`.
    pub fn pseudo_inverse(&self, tol: Option<f64>) -> Result<Matrix> {
        let r = self.rank(tol);
        let (m, n) = self.shape;
        if r == 0 {
            return Ok(Matrix::zeros(n, m));
        }
        // V_r diag(1/s) : n × r
        let v_scaled = Matrix::from_fn(n, r, |i, k| self.vt.get(k, i) / self.singular_values[k]);
        let ut_r = Matrix::from_fn(r, m, |k, j| self.u.get(j, k));
        v_scaled.matmul(&ut_r).map_err(numerical)
    }

    /// `A† · b` without forming `A†` explicitly.
    pub fn solve(&self, b: &Matrix, tol: Option<f64>) -> Result<Matrix> {
        let (m, n) = self.shape;
        if b.rows() != m {
            return Err(Error::Shape {
                op: "pinv solve",
                left: (n, m),
                right: b.shape(),
            });
        }
        let r = self.rank(tol);
        if r == 0 {
            return Ok(Matrix::zeros(n, b.cols()));
        }
        let ut_r = Matrix::from_fn(r, m, |k, j| self.u.get(j, k));
        let mut coeffs = ut_r.matmul(b)?;
        for k in 0..r {
            let inv = 1.0 / self.singular_values[k];
            let cols = coeffs.cols;
            for v in &mut coeffs.data[k * cols..(k + 1) * cols] {
                *v *= inv;
            }
        }
        let v_r = Matrix::from_fn(n, r, |i, k| self.vt.get(k, i));
        v_r.matmul(&coeffs).map_err(numerical)
    }

    /// Orthonormal basis of the column space: the left singular vectors
    /// whose singular values exceed the tolerance.
    pub fn range_basis(&self, tol: Option<f64>) -> Matrix {
        let r = self.rank(tol);
        self.u.column_range(0..r)
    }
}

fn numerical(e: Error) -> Error {
    match e {
        Error::NonFinite(op) => Error::Numerical(format!("non-finite result in {op}")),
        other => other,
    }
}

fn check_tolerance(tol: Option<f64>) -> Result<()> {
    match tol {
        Some(t) if !(t >= 0.0 && t.is_finite()) => {
            Err(Error::config(format!("pinv tolerance must be finite and >= 0, got {t}")))
        }
        _ => Ok(()),
    }
}

/// Moore-Penrose pseudoinverse via SVD. Singular values at or below the
/// effective tolerance (explicit `tol`, or the default numerical-rank
/// cutoff) are zeroed.
pub fn pinv(a: &Matrix, tol: Option<f64>) -> Result<Matrix> {
    check_tolerance(tol)?;
    Svd::new(a)?.pseudo_inverse(tol)
}

/// `pinv(a) · b`, computed through the SVD factors.
pub fn pinv_solve(a: &Matrix, b: &Matrix, tol: Option<f64>) -> Result<Matrix> {
    check_tolerance(tol)?;
    Svd::new(a)?.solve(b, tol)
}

/// Orthonormal basis for the column space of `a` (`a.rows × rank`).
///
/// An all-zero input yields a zero-column matrix.
pub fn orth(a: &Matrix) -> Result<Matrix> {
    orth_with_tolerance(a, None)
}

pub fn orth_with_tolerance(a: &Matrix, tol: Option<f64>) -> Result<Matrix> {
    check_tolerance(tol)?;
    if a.rows == 0 {
        return Err(Error::config("orth of a matrix with no rows"));
    }
    if a.cols == 0 {
        return Ok(Matrix::zeros(a.rows, 0));
    }
    Ok(Svd::new(a)?.range_basis(tol))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Removes from `v` its components along each (orthonormal) basis vector.
/// Two passes of modified Gram-Schmidt.
pub(crate) fn orthogonalize_against(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let p = dot(v, q);
            for (x, y) in v.iter_mut().zip(q) {
                *x -= p * y;
            }
        }
    }
}

/// Orthonormalizes the columns of `a` in order. Fails if the columns are
/// numerically dependent.
pub fn orthonormalize_columns(a: &Matrix) -> Result<Matrix> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(a.cols);
    for c in 0..a.cols {
        let mut v = a.column(c);
        let before = norm(&v);
        orthogonalize_against(&mut v, &basis);
        let after = norm(&v);
        if after <= 1e-10 * before.max(f64::MIN_POSITIVE) {
            return Err(Error::Numerical(format!(
                "column {c} is linearly dependent on the previous columns"
            )));
        }
        v.iter_mut().for_each(|x| *x /= after);
        basis.push(v);
    }
    Matrix::from_columns(a.rows, &basis)
}
