//! Self-contained dense complex eigensolvers.
//!
//! * Hermitian matrices: cyclic two-sided Jacobi rotations. Each rotation
//!   annihilates one off-diagonal pair; sweeps repeat until
//!   `off(A) <= 1e-13 * frob(A)` or the sweep limit is hit.
//! * General (non-Hermitian) matrices up to dimension 64: Householder
//!   reduction to Hessenberg form followed by shifted QR iteration with
//!   Wilkinson shifts and deflation. Eigenvalues only.
//!
//! Operator norms, pseudo-inverse pieces and PSD fractional powers are all
//! derived from the Hermitian path so that every consumer shares one set of
//! spectral conventions (ascending eigenvalues, orthonormal columns).

use num_complex::Complex;
use thiserror::Error;

use crate::cmatrix::{CMatrix, MatrixError};
use crate::C64;

/// Relative Frobenius asymmetry tolerated by [`hermitian_eig`].
pub const HERMITIAN_CHECK_TOL: f64 = 1e-12;
/// Jacobi sweep target: `off(A) <= JACOBI_OFF_TOL * frob(A)`.
const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 60;
/// Largest dimension accepted by [`eigenvalues_general`].
pub const GENERAL_EIG_MAX_DIM: usize = 64;
const QR_MAX_ITERS_PER_EIG: usize = 60;
/// NotPSD threshold: minimum eigenvalue below `-1e-8 * norm` is an error.
const PSD_REJECT_TOL: f64 = 1e-8;

/// Errors raised by the eigensolver layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: asymmetry {asymmetry:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { asymmetry: f64, tol: f64 },
    #[error("eigensolver failed to converge: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig:.3e}")]
    NotPsd { min_eig: f64 },
    #[error("dimension {dim} exceeds supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("fractional power exponent {p} outside (0, 1]")]
    InvalidExponent { p: f64 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Eigendecomposition of a Hermitian matrix.
///
/// `values` ascend; column `k` of `vectors` is a unit eigenvector for
/// `values[k]` and the columns are orthonormal.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermEig {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Rebuilds `Q f(diag) Q^*` for an entrywise spectral function `f`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let fv: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        self.reconstruct_with(&fv)
    }

    /// Rebuilds `Q diag(values) Q^*` for caller-supplied per-mode values
    /// (used when the modes are rescored independently of the eigenvalues,
    /// e.g. singular values refined past the Gram-matrix rounding floor).
    pub fn reconstruct_with(&self, values: &[f64]) -> CMatrix {
        assert_eq!(values.len(), self.dim(), "one value per eigenvector");
        let n = self.dim();
        let q = &self.vectors;
        let scaled = CMatrix::from_fn(n, n, |i, k| q.get(i, k).scale(values[k]));
        scaled.matmul(&q.adjoint())
    }

    /// Rebuilds the original matrix `Q diag Q^*`.
    pub fn reconstruct(&self) -> CMatrix {
        self.apply_fn(|x| x)
    }
}

fn off_diag_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// The input must be square with `frob(A - A^*) <= 1e-12 * (1 + frob(A))`;
/// it is symmetrized before iterating so the tiny asymmetry of products like
/// `T^* T` cannot accumulate.
pub fn hermitian_eig(a: &CMatrix) -> Result<HermEig, LinalgError> {
    if !a.is_square() {
        return Err(MatrixError::NotSquare { rows: a.rows(), cols: a.cols() }.into());
    }
    let n = a.rows();
    let asym = a.sub(&a.adjoint()).frob_norm();
    let tol = HERMITIAN_CHECK_TOL * (1.0 + a.frob_norm());
    if asym > tol {
        return Err(LinalgError::NotHermitian { asymmetry: asym, tol });
    }

    // Work on the Hermitian part; diagonal imaginary dust is dropped.
    let mut m = CMatrix::from_fn(n, n, |i, j| (a.get(i, j) + a.get(j, i).conj()).scale(0.5));
    let mut q = CMatrix::identity(n);
    let frob = m.frob_norm();
    let target = JACOBI_OFF_TOL * frob;

    if n == 1 {
        return Ok(HermEig { values: vec![m.get(0, 0).re], vectors: q });
    }

    let mut converged = frob == 0.0 || off_diag_norm(&m) <= target;
    let mut sweeps = 0;
    while !converged {
        if sweeps >= JACOBI_MAX_SWEEPS {
            return Err(LinalgError::NoConvergence {
                residual: off_diag_norm(&m),
                iterations: sweeps,
            });
        }
        for p in 0..n - 1 {
            for qi in p + 1..n {
                let z = m.get(p, qi);
                let r = z.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = z / r; // e^{i phi}
                let app = m.get(p, p).re;
                let aqq = m.get(qi, qi).re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Unitary J: J[p][p]=c, J[p][q]=s, J[q][p]=-conj(phase)*s,
                // J[q][q]=conj(phase)*c;  m <- J^* m J,  q <- q J.
                let es = phase.conj() * s; // e^{-i phi} s
                let ec = phase.conj() * c; // e^{-i phi} c

                for j in 0..n {
                    let x = m.get(p, j);
                    let y = m.get(qi, j);
                    m.set(p, j, x.scale(c) - phase * y * s);
                    m.set(qi, j, x.scale(s) + phase * y * c);
                }
                for i in 0..n {
                    let x = m.get(i, p);
                    let y = m.get(i, qi);
                    m.set(i, p, x.scale(c) - y * es);
                    m.set(i, qi, x.scale(s) + y * ec);
                    let qx = q.get(i, p);
                    let qy = q.get(i, qi);
                    q.set(i, p, qx.scale(c) - qy * es);
                    q.set(i, qi, qx.scale(s) + qy * ec);
                }
                // Clean the annihilated pair and diagonal dust explicitly.
                m.set(p, qi, Complex::new(0.0, 0.0));
                m.set(qi, p, Complex::new(0.0, 0.0));
                let dp = m.get(p, p);
                let dq = m.get(qi, qi);
                m.set(p, p, Complex::new(dp.re, 0.0));
                m.set(qi, qi, Complex::new(dq.re, 0.0));
            }
        }
        sweeps += 1;
        converged = off_diag_norm(&m) <= target;
    }

    // Sort ascending, carrying eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&k| diag[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| q.get(i, order[j]));
    Ok(HermEig { values, vectors })
}

/// Largest singular value (spectral norm) of a rectangular matrix.
pub fn operator_norm(a: &CMatrix) -> Result<f64, LinalgError> {
    if a.max_abs_entry() == 0.0 {
        return Ok(0.0);
    }
    // Use the smaller Gram matrix of the two.
    let gram = if a.rows() >= a.cols() {
        a.adjoint().matmul(a)
    } else {
        a.matmul(&a.adjoint())
    };
    let eig = hermitian_eig(&gram)?;
    let top = eig.values.last().copied().unwrap_or(0.0);
    Ok(top.max(0.0).sqrt())
}

/// Smallest singular value of a square matrix.
pub fn min_singular_value(a: &CMatrix) -> Result<f64, LinalgError> {
    let gram = a.adjoint().matmul(a);
    let eig = hermitian_eig(&gram)?;
    let bottom = eig.values.first().copied().unwrap_or(0.0);
    Ok(bottom.max(0.0).sqrt())
}

/// Operator-norm distance `||a - b||`.
pub fn op_distance(a: &CMatrix, b: &CMatrix) -> Result<f64, LinalgError> {
    operator_norm(&a.sub(b))
}

/// Fractional power `A^p` of a Hermitian positive-semidefinite matrix,
/// `p` in `(0, 1]`. Eigenvalues in `[-1e-8*||A||, 0)` are clamped to zero;
/// anything lower is rejected as NotPsd.
pub fn psd_power(a: &CMatrix, p: f64) -> Result<CMatrix, LinalgError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(LinalgError::InvalidExponent { p });
    }
    let eig = hermitian_eig(a)?;
    let scale = eig
        .values
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let min_eig = eig.values.first().copied().unwrap_or(0.0);
    if min_eig < -PSD_REJECT_TOL * scale.max(1e-300) {
        return Err(LinalgError::NotPsd { min_eig });
    }
    Ok(eig.apply_fn(|v| if v <= 0.0 { 0.0 } else { v.powf(p) }))
}

// ---------------------------------------------------------------------------
// General (non-Hermitian) eigenvalues: Hessenberg + shifted QR.
// ---------------------------------------------------------------------------

fn householder_hessenberg(h: &mut Vec<Vec<C64>>) {
    let n = h.len();
    for k in 0..n.saturating_sub(2) {
        // Reflect column k below the subdiagonal to zero.
        let mut norm_x = 0.0;
        for i in (k + 1)..n {
            norm_x += h[i][k].norm_sqr();
        }
        norm_x = norm_x.sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = h[k + 1][k];
        let alpha = if x0.norm() == 0.0 {
            Complex::new(-norm_x, 0.0)
        } else {
            -(x0 / x0.norm()) * norm_x
        };
        // v = x - alpha e1, beta = 2 / ||v||^2
        let mut v = vec![Complex::new(0.0, 0.0); n];
        let mut vnorm2 = 0.0;
        for i in (k + 1)..n {
            let vi = if i == k + 1 { h[i][k] - alpha } else { h[i][k] };
            vnorm2 += vi.norm_sqr();
            v[i] = vi;
        }
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // H = I - beta v v^*;  h <- H h H
        for j in 0..n {
            let mut dot = Complex::new(0.0, 0.0);
            for i in (k + 1)..n {
                dot += v[i].conj() * h[i][j];
            }
            dot *= beta;
            for i in (k + 1)..n {
                let sub = v[i] * dot;
                h[i][j] -= sub;
            }
        }
        for row in h.iter_mut() {
            let mut dot = Complex::new(0.0, 0.0);
            for i in (k + 1)..n {
                dot += row[i] * v[i];
            }
            dot *= beta;
            for i in (k + 1)..n {
                let sub = dot * v[i].conj();
                row[i] -= sub;
            }
        }
        for i in (k + 2)..n {
            h[i][k] = Complex::new(0.0, 0.0);
        }
    }
}

fn eig_2x2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let half_tr = (a + d).scale(0.5);
    let disc = ((a - d).scale(0.5)).powu(2) + b * c;
    let sq = disc.sqrt();
    (half_tr + sq, half_tr - sq)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let (l1, l2) = eig_2x2(a, b, c, d);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Givens pair (c real, s complex) zeroing `b` against `a`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, Complex::new(0.0, 0.0));
    }
    let rho = (na * na + nb * nb).sqrt();
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let c = na / rho;
    let s = (a / na) * b.conj() / rho;
    (c, s)
}

/// Eigenvalues of a general complex square matrix, dimension <= 64.
///
/// Returns the eigenvalue multiset sorted by (re, im). Uses Hessenberg
/// reduction and shifted QR with deflation; 1x1 and 2x2 trailing blocks are
/// resolved directly.
pub fn eigenvalues_general(a: &CMatrix) -> Result<Vec<C64>, LinalgError> {
    if !a.is_square() {
        return Err(MatrixError::NotSquare { rows: a.rows(), cols: a.cols() }.into());
    }
    let n = a.rows();
    if n > GENERAL_EIG_MAX_DIM {
        return Err(LinalgError::DimensionTooLarge { dim: n, max: GENERAL_EIG_MAX_DIM });
    }
    let mut h: Vec<Vec<C64>> = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j)).collect())
        .collect();
    householder_hessenberg(&mut h);

    let scale = a.frob_norm().max(1e-300);
    let eps = f64::EPSILON;
    let mut eigs: Vec<C64> = Vec::with_capacity(n);
    let mut hi = n as isize - 1;
    let mut iters_since_deflation = 0usize;

    while hi >= 0 {
        let hiu = hi as usize;
        if hiu == 0 {
            eigs.push(h[0][0]);
            hi -= 1;
            continue;
        }
        // Deflate negligible subdiagonals.
        let sub = h[hiu][hiu - 1].norm();
        let local = h[hiu - 1][hiu - 1].norm() + h[hiu][hiu].norm();
        if sub <= eps * local.max(scale * 1e-30) {
            h[hiu][hiu - 1] = Complex::new(0.0, 0.0);
            eigs.push(h[hiu][hiu]);
            hi -= 1;
            iters_since_deflation = 0;
            continue;
        }
        // Find the start of the active unreduced block.
        let mut lo = hiu;
        while lo > 0 {
            let s = h[lo][lo - 1].norm();
            let l = h[lo - 1][lo - 1].norm() + h[lo][lo].norm();
            if s <= eps * l.max(scale * 1e-30) {
                h[lo][lo - 1] = Complex::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if hiu - lo == 1 {
            // 2x2 block: solve directly.
            let (l1, l2) = eig_2x2(h[lo][lo], h[lo][hiu], h[hiu][lo], h[hiu][hiu]);
            eigs.push(l1);
            eigs.push(l2);
            hi -= 2;
            iters_since_deflation = 0;
            continue;
        }

        if iters_since_deflation >= QR_MAX_ITERS_PER_EIG {
            return Err(LinalgError::NoConvergence {
                residual: sub,
                iterations: iters_since_deflation,
            });
        }
        let mu = if iters_since_deflation > 0 && iters_since_deflation % 12 == 0 {
            // Exceptional shift to break rare symmetric stalls.
            h[hiu][hiu] + Complex::new(1.5 * h[hiu][hiu - 1].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[hiu - 1][hiu - 1],
                h[hiu - 1][hiu],
                h[hiu][hiu - 1],
                h[hiu][hiu],
            )
        };
        iters_since_deflation += 1;

        // Explicit shifted QR step via Givens chase on the active block.
        for i in lo..=hiu {
            h[i][i] -= mu;
        }
        let mut rots: Vec<(f64, C64)> = Vec::with_capacity(hiu - lo);
        for k in lo..hiu {
            let (c, s) = givens(h[k][k], h[k + 1][k]);
            rots.push((c, s));
            for j in k..=hiu {
                let x = h[k][j];
                let y = h[k + 1][j];
                h[k][j] = x.scale(c) + s * y;
                h[k + 1][j] = -s.conj() * x + y.scale(c);
            }
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = lo + idx;
            let top = (k + 2).min(hiu);
            for i in lo..=top {
                let x = h[i][k];
                let y = h[i][k + 1];
                h[i][k] = x.scale(c) + s.conj() * y;
                h[i][k + 1] = -s * x + y.scale(c);
            }
        }
        for i in lo..=hiu {
            h[i][i] += mu;
        }
    }

    eigs.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(eigs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::c;

    fn check_herm_eig(a: &CMatrix) -> HermEig {
        let eig = hermitian_eig(a).unwrap();
        let n = a.rows();
        let scale = 1.0 + eig.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        // Residual ||A v - lambda v|| per pair.
        for k in 0..n {
            let v: Vec<C64> = (0..n).map(|i| eig.vectors.get(i, k)).collect();
            let av = a.mul_vec(&v);
            let mut res = 0.0f64;
            for i in 0..n {
                res += (av[i] - v[i].scale(eig.values[k])).norm_sqr();
            }
            assert!(res.sqrt() <= 1e-10 * scale, "residual {} too big", res.sqrt());
        }
        // Orthonormality of eigenvector columns.
        let q = &eig.vectors;
        let gram = q.adjoint().matmul(q);
        assert!(gram.approx_eq(&CMatrix::identity(n), 1e-10));
        // Ascending order.
        for w in eig.values.windows(2) {
            assert!(w[0] <= w[1] + 1e-12);
        }
        eig
    }

    #[test]
    fn diagonal_matrix_is_its_own_decomposition() {
        let a = CMatrix::diag_real(&[0.0, 1.0]);
        let eig = check_herm_eig(&a);
        assert_eq!(eig.values, vec![0.0, 1.0]);
        assert!(eig.vectors.approx_eq(&CMatrix::identity(2), 0.0));
    }

    #[test]
    fn known_symmetric_2x2() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let a = CMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let eig = check_herm_eig(&a);
        assert!((eig.values[0] - 1.0).abs() < 1e-12);
        assert!((eig.values[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn complex_hermitian_3x3() {
        let a = CMatrix::from_complex_rows(&[
            vec![(2.0, 0.0), (0.0, 1.0), (0.5, 0.5)],
            vec![(0.0, -1.0), (1.0, 0.0), (1.0, 0.0)],
            vec![(0.5, -0.5), (1.0, 0.0), (0.0, 0.0)],
        ]);
        let eig = check_herm_eig(&a);
        let rebuilt = eig.reconstruct();
        assert!(rebuilt.approx_eq(&a, 1e-12));
        let tr: f64 = eig.values.iter().sum();
        assert!((tr - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian_input() {
        let a = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&a), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn operator_norm_of_nilpotent_is_one() {
        let a = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!((operator_norm(&a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_matches_scaled_unitary() {
        // Row-permutation matrix scaled by 3: norm exactly 3.
        let a = CMatrix::from_real_rows(&[vec![0.0, 3.0], vec![3.0, 0.0]]);
        assert!((operator_norm(&a).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn psd_power_half_squares_back() {
        let a = CMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let root = psd_power(&a, 0.5).unwrap();
        assert!(root.matmul(&root).approx_eq(&a, 1e-12));
    }

    #[test]
    fn psd_power_unit_exponent_is_identity_map() {
        let a = CMatrix::from_complex_rows(&[
            vec![(1.5, 0.0), (0.25, 0.5)],
            vec![(0.25, -0.5), (2.0, 0.0)],
        ]);
        let p1 = psd_power(&a, 1.0).unwrap();
        assert!(p1.approx_eq(&a, 1e-12));
    }

    #[test]
    fn psd_power_clamps_rounding_negatives_and_rejects_indefinite() {
        let tiny = CMatrix::diag_real(&[-1e-12, 1.0]);
        let sqrt = psd_power(&tiny, 0.5).unwrap();
        assert_eq!(sqrt.get(0, 0), c(0.0, 0.0));
        let indef = CMatrix::diag_real(&[-1.0, 1.0]);
        assert!(matches!(psd_power(&indef, 0.5), Err(LinalgError::NotPsd { .. })));
    }

    #[test]
    fn psd_power_monotone_on_commuting_pair() {
        // A <= B diagonal => A^p <= B^p entrywise on the diagonal.
        let a = CMatrix::diag_real(&[0.3, 1.2, 2.0]);
        let b = CMatrix::diag_real(&[0.5, 1.5, 2.5]);
        for &p in &[0.25, 0.5, 0.75, 1.0] {
            let ap = psd_power(&a, p).unwrap();
            let bp = psd_power(&b, p).unwrap();
            for i in 0..3 {
                assert!(ap.get(i, i).re <= bp.get(i, i).re + 1e-12);
            }
        }
    }

    #[test]
    fn general_eigenvalues_of_diagonal() {
        let a = CMatrix::diag(&[c(1.0, 0.0), c(0.0, 2.0)]);
        let eigs = eigenvalues_general(&a).unwrap();
        assert!((eigs[0] - c(0.0, 2.0)).norm() < 1e-10 || (eigs[1] - c(0.0, 2.0)).norm() < 1e-10);
        assert!(eigs.iter().any(|e| (e - c(1.0, 0.0)).norm() < 1e-10));
    }

    #[test]
    fn general_eigenvalues_product_matches_determinant() {
        // Deterministic well-conditioned 5x5.
        let n = 5;
        let a = CMatrix::from_fn(n, n, |i, j| {
            let x = ((i * 7 + j * 3 + 1) % 11) as f64 / 11.0 - 0.4;
            let y = ((i * 5 + j * 2 + 3) % 13) as f64 / 13.0 - 0.5;
            c(x, y)
        });
        let eigs = eigenvalues_general(&a).unwrap();
        let prod = eigs.iter().fold(c(1.0, 0.0), |acc, &e| acc * e);
        let det = a.determinant().unwrap();
        assert!(
            (prod - det).norm() <= 1e-8 * det.norm().max(1.0),
            "prod {prod} vs det {det}"
        );
        let tr_sum: C64 = eigs.iter().sum();
        assert!((tr_sum - a.trace()).norm() <= 1e-9);
    }

    #[test]
    fn general_eigenvalues_residuals_are_small() {
        let a = CMatrix::from_fn(6, 6, |i, j| {
            c(
                (((i + 2) * (j + 5)) % 7) as f64 / 7.0,
                (((i + 3) * (j + 1)) % 5) as f64 / 5.0 - 0.3,
            )
        });
        let norm = operator_norm(&a).unwrap();
        for lam in eigenvalues_general(&a).unwrap() {
            let shifted = a.sub(&CMatrix::identity(6).scale(lam));
            let smin = min_singular_value(&shifted).unwrap();
            assert!(smin <= 1e-8 * (1.0 + norm), "eigenvalue residual {smin}");
        }
    }

    #[test]
    fn general_eigenvalues_rejects_large_dimension() {
        let a = CMatrix::identity(65);
        assert!(matches!(
            eigenvalues_general(&a),
            Err(LinalgError::DimensionTooLarge { dim: 65, max: 64 })
        ));
    }

    #[test]
    fn general_eigenvalues_handles_jordan_block() {
        // Defective matrix: double eigenvalue 1 with a single Jordan block.
        let a = CMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]);
        let eigs = eigenvalues_general(&a).unwrap();
        for e in eigs {
            assert!((e - c(1.0, 0.0)).norm() < 1e-7);
        }
    }

    #[test]
    fn hermitian_path_agrees_with_general_path() {
        let a = CMatrix::from_complex_rows(&[
            vec![(1.0, 0.0), (0.0, 0.7), (0.2, 0.0)],
            vec![(0.0, -0.7), (-0.5, 0.0), (0.3, 0.1)],
            vec![(0.2, 0.0), (0.3, -0.1), (2.0, 0.0)],
        ]);
        let he = hermitian_eig(&a).unwrap();
        let mut ge: Vec<f64> = eigenvalues_general(&a)
            .unwrap()
            .iter()
            .map(|z| {
                assert!(z.im.abs() < 1e-9);
                z.re
            })
            .collect();
        ge.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (h, g) in he.values.iter().zip(&ge) {
            assert!((h - g).abs() < 1e-9);
        }
    }
}
