//! Dense complex matrices, row-major, with the small set of operations the
//! rest of the crate needs. No external linear-algebra backend.

#[cfg(test)]
use num_complex::Complex;
use thiserror::Error;

use crate::C64;

/// Errors raised by matrix construction and shape-checked arithmetic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("data length {len} does not match {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },
    #[error("matrix dimensions must be nonzero")]
    EmptyMatrix,
    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("dimension mismatch: ({lr}x{lc}) vs ({rr}x{rc})")]
    DimensionMismatch { lr: usize, lc: usize, rr: usize, rc: usize },
    #[error("operation requires a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

/// Dense row-major complex matrix.
///
/// Invariants: `data.len() == rows * cols`, every entry finite.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    /// Builds a matrix from row-major data, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(MatrixError::ShapeMismatch { rows, cols, len: data.len() });
        }
        for (k, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(MatrixError::NonFiniteEntry { row: k / cols, col: k % cols });
            }
        }
        Ok(Self { rows, cols, data })
    }

    /// Zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Square diagonal matrix from complex diagonal entries.
    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = entries[i];
        }
        m
    }

    /// Square diagonal matrix from real diagonal entries.
    pub fn diag_real(entries: &[f64]) -> Self {
        let d: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&d)
    }

    /// Builds a matrix by evaluating `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested real rows (test convenience).
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    /// Builds a matrix from nested complex rows given as (re, im) pairs.
    pub fn from_complex_rows(rows: &[Vec<(f64, f64)>]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j].0, rows[i][j].1))
    }

    /// Column vector from a slice.
    pub fn col_vector(entries: &[C64]) -> Self {
        Self { rows: entries.len(), cols: 1, data: entries.to_vec() }
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

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj_entrywise(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Matrix sum; panics on shape mismatch (shapes are static in this crate).
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add: shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Matrix difference.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sub: shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// Real scalar multiple.
    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// Matrix product.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: inner dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = k * other.cols;
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[row + j];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len(), "mul_vec: dimension mismatch");
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            let row = i * self.cols;
            for j in 0..self.cols {
                acc += self.data[row + j] * x[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Frobenius norm.
    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance to another matrix.
    pub fn frob_dist(&self, other: &Self) -> f64 {
        self.sub(other).frob_norm()
    }

    /// True when every entry is within `tol` (modulus) of the other matrix.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols)
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Determinant via LU decomposition with partial pivoting.
    pub fn determinant(&self) -> Result<C64, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut lu = self.data.clone();
        let mut det = C64::new(1.0, 0.0);
        for k in 0..n {
            let mut pivot = k;
            let mut best = lu[k * n + k].norm();
            for r in (k + 1)..n {
                let cand = lu[r * n + k].norm();
                if cand > best {
                    best = cand;
                    pivot = r;
                }
            }
            if best == 0.0 {
                return Ok(C64::new(0.0, 0.0));
            }
            if pivot != k {
                for j in 0..n {
                    lu.swap(k * n + j, pivot * n + j);
                }
                det = -det;
            }
            let d = lu[k * n + k];
            det *= d;
            for r in (k + 1)..n {
                let factor = lu[r * n + k] / d;
                if factor.re == 0.0 && factor.im == 0.0 {
                    continue;
                }
                for j in k..n {
                    let t = lu[k * n + j];
                    lu[r * n + j] -= factor * t;
                }
            }
        }
        Ok(det)
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> C64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

/// Inner product `<x, y> = sum x_k * conj(y_k)` (conjugate-linear in `y`).
pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Rank-one matrix `x (x) y`, acting as `u -> <u, y> x`; equals `x * y^*`.
pub fn rank_one(x: &[C64], y: &[C64]) -> CMatrix {
    CMatrix::from_fn(x.len(), y.len(), |i, j| x[i] * y[j].conj())
}

/// Shorthand constructor for test fixtures.
#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}
