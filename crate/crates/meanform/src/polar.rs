//! Canonical polar decomposition and the transforms built on it.
//!
//! For square `T`, the canonical polar decomposition is `T = V |T|` where
//! `|T| = (T^* T)^(1/2)` and `V` is the partial isometry with
//! `ker V = ker T`. From it:
//!
//! * mean transform        `mean(T)   = (V|T| + |T|V) / 2`
//! * λ-Aluthge transform   `aluthge(T, λ) = |T|^λ V |T|^(1-λ)`
//!
//! Quasinormal operators (`V|T| = |T|V`) are exactly the fixed points of
//! both. Iterating the mean transform yields a norm sequence that is
//! non-increasing; its limit is estimated by [`mean_limit_estimate`].
//!
//! The decomposition is computed from the Hermitian eigendecomposition of
//! `T^* T` with pseudo-inversion below a relative rank floor, not from a
//! general SVD: the eigenvector basis then serves `|T|`, `|T|^p` and the
//! pseudo-inverse consistently, keeping `V |T| - T` at rounding level even
//! for rank-deficient input.

use crate::binom::mean_pmf_window;
use crate::classes::{self, DEFAULT_CLASS_TOL};
use crate::cmatrix::{inner, rank_one, vec_norm, CMatrix};
use crate::eig::{hermitian_eig, operator_norm, psd_power, LinalgError};
use crate::numrange;
use crate::C64;
use thiserror::Error;

/// Largest dimension accepted by [`canonical_polar`].
pub const POLAR_MAX_DIM: usize = 200;
/// Relative rank floor: singular values below `1e-10 * max(1, ||T||)` are
/// treated as zero by the polar pseudo-inverse, numerical rank, and kernel
/// checks alike.
pub const RANK_TOL_FACTOR: f64 = 1e-10;
/// Default stopping tolerance for mean-transform iteration.
pub const DEFAULT_STOP_TOL: f64 = 1e-10;
/// Default iteration cap for mean-transform iteration.
pub const DEFAULT_N_MAX: usize = 10_000;

/// Angular samples used for the per-step numerical radius in iterate traces.
const TRACE_RADIUS_POINTS: usize = 72;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("kernel inclusion ker(T^*) within ker(T) fails (residual {residual:.3e}); the binomial form requires it")]
    KernelInclusionViolated { residual: f64 },
    #[error("rank-one factors must be nonzero vectors")]
    ZeroVector,
    #[error("input is not a partial isometry (residual {residual:.3e} exceeds tolerance {tol:.3e})")]
    NotPartialIsometry { residual: f64, tol: f64 },
    #[error("Aluthge parameter {lambda} outside [0, 1]")]
    InvalidLambda { lambda: f64 },
}

/// Canonical polar decomposition `T = V |T|`.
#[derive(Debug, Clone)]
pub struct PolarParts {
    /// Partial isometry `V` with `ker V = ker T`.
    pub isometry_part: CMatrix,
    /// Modulus `|T| = (T^* T)^(1/2)`, positive semidefinite.
    pub modulus: CMatrix,
    /// Number of singular values above `rank_tol`.
    pub numerical_rank: usize,
    /// Rank floor used for pseudo-inversion.
    pub rank_tol: f64,
}

/// Rank floor for a given operator norm.
pub fn rank_tolerance(norm: f64) -> f64 {
    RANK_TOL_FACTOR * norm.max(1.0)
}

/// Canonical polar decomposition via the eigendecomposition of `T^* T`.
pub fn canonical_polar(t: &CMatrix) -> Result<PolarParts, TransformError> {
    if !t.is_square() {
        return Err(LinalgError::from(crate::cmatrix::MatrixError::NotSquare {
            rows: t.rows(),
            cols: t.cols(),
        })
        .into());
    }
    let n = t.rows();
    if n > POLAR_MAX_DIM {
        return Err(LinalgError::DimensionTooLarge { dim: n, max: POLAR_MAX_DIM }.into());
    }
    let gram = t.adjoint().matmul(t);
    let eig = hermitian_eig(&gram)?;
    // Rescore each singular value as ||T v_k||: Gram eigenvalues carry an
    // absolute error of order eps * ||T||^2, which after the square root
    // floods tiny singular values at the 1e-8 * ||T|| level; the rescored
    // values keep kernel modes at rounding level, so the rank floor below
    // separates cleanly.
    let singulars: Vec<f64> = (0..n)
        .map(|k| {
            let v: Vec<C64> = (0..n).map(|i| eig.vectors.get(i, k)).collect();
            vec_norm(&t.mul_vec(&v))
        })
        .collect();
    let norm = singulars.iter().fold(0.0f64, |a, &b| a.max(b));
    let rank_tol = rank_tolerance(norm);
    let numerical_rank = singulars.iter().filter(|&&s| s > rank_tol).count();

    let modulus = eig.reconstruct_with(&singulars);
    let pinv_values: Vec<f64> = singulars
        .iter()
        .map(|&s| if s > rank_tol { 1.0 / s } else { 0.0 })
        .collect();
    let isometry_part = t.matmul(&eig.reconstruct_with(&pinv_values));
    Ok(PolarParts { isometry_part, modulus, numerical_rank, rank_tol })
}

/// Mean transform of the polar parts: `(V P + P V) / 2`.
pub fn mean_from_parts(parts: &PolarParts) -> CMatrix {
    let vp = parts.isometry_part.matmul(&parts.modulus);
    let pv = parts.modulus.matmul(&parts.isometry_part);
    vp.add(&pv).scale_re(0.5)
}

/// Mean transform `(V |T| + |T| V) / 2`.
pub fn mean_transform(t: &CMatrix) -> Result<CMatrix, TransformError> {
    Ok(mean_from_parts(&canonical_polar(t)?))
}

/// λ-Aluthge transform `|T|^λ V |T|^(1-λ)`; `lambda` in `[0, 1]`,
/// default 1/2 recovers the classical Aluthge transform.
pub fn aluthge_transform(t: &CMatrix, lambda: f64) -> Result<CMatrix, TransformError> {
    if !(0.0..=1.0).contains(&lambda) || !lambda.is_finite() {
        return Err(TransformError::InvalidLambda { lambda });
    }
    let parts = canonical_polar(t)?;
    let v = &parts.isometry_part;
    let p = &parts.modulus;
    let left = if lambda == 0.0 {
        None
    } else {
        Some(psd_power(p, lambda)?)
    };
    let right = if lambda == 1.0 {
        None
    } else {
        Some(psd_power(p, 1.0 - lambda)?)
    };
    let mid = match &right {
        Some(r) => v.matmul(r),
        None => v.clone(),
    };
    Ok(match &left {
        Some(l) => l.matmul(&mid),
        None => mid,
    })
}

/// One recorded step of the mean-transform iteration.
#[derive(Debug, Clone)]
pub struct IterateStep {
    pub index: usize,
    /// The n-th iterate itself.
    pub snapshot: CMatrix,
    pub norm: f64,
    pub numerical_radius: f64,
    /// `||iterate_n - iterate_{n-1}||`; 0 at index 0.
    pub step_distance: f64,
    pub quasinormal: bool,
}

/// Trace of the mean-transform iteration.
#[derive(Debug, Clone)]
pub struct IterateTrace {
    pub steps: Vec<IterateStep>,
    /// True when two consecutive norms or iterates got closer than `stop_tol`.
    pub converged: bool,
    /// Last recorded norm; estimates `lim ||mean^n(T)||` when converged.
    pub limit_estimate: f64,
}

/// Mean-limit estimate (last iterate norm plus convergence status).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanLimit {
    pub value: f64,
    pub converged: bool,
    /// Index of the last computed iterate.
    pub iterations: usize,
}

/// Iterates the mean transform, recording norm, numerical radius, step
/// distance and a quasinormality flag at every step. Stops once consecutive
/// norms or consecutive iterates differ by less than `stop_tol`, or after
/// `n_max` steps.
pub fn mean_iterates(
    t: &CMatrix,
    n_max: usize,
    stop_tol: f64,
) -> Result<IterateTrace, TransformError> {
    let mut steps: Vec<IterateStep> = Vec::new();
    let mut current = t.clone();
    let mut converged = false;
    let mut index = 0usize;
    loop {
        let norm = operator_norm(&current)?;
        let radius = numrange::numerical_range_boundary(&current, TRACE_RADIUS_POINTS)
            .map(|b| b.num_radius)?;
        let quasinormal = classes::is_quasinormal(&current, DEFAULT_CLASS_TOL)?;
        let step_distance = match steps.last() {
            Some(prev) => operator_norm(&current.sub(&prev.snapshot))?,
            None => 0.0,
        };
        if let Some(prev) = steps.last() {
            if (prev.norm - norm).abs() < stop_tol || step_distance < stop_tol {
                converged = true;
            }
        }
        steps.push(IterateStep {
            index,
            snapshot: current.clone(),
            norm,
            numerical_radius: radius,
            step_distance,
            quasinormal,
        });
        if converged || index >= n_max {
            break;
        }
        current = mean_transform(&current)?;
        index += 1;
    }
    let limit_estimate = steps.last().map(|s| s.norm).unwrap_or(0.0);
    Ok(IterateTrace { steps, converged, limit_estimate })
}

/// Estimates `lim_n ||mean^n(T)||` without building a trace: same iteration
/// and stopping rule as [`mean_iterates`], but skips the per-step numerical
/// radius and keeps only the running iterate.
pub fn mean_limit_estimate(
    t: &CMatrix,
    n_max: usize,
    stop_tol: f64,
) -> Result<MeanLimit, TransformError> {
    let mut current = t.clone();
    let mut prev_norm = operator_norm(&current)?;
    let mut index = 0usize;
    while index < n_max {
        let next = mean_transform(&current)?;
        let norm = operator_norm(&next)?;
        let dist = operator_norm(&next.sub(&current))?;
        index += 1;
        current = next;
        let done = (prev_norm - norm).abs() < stop_tol || dist < stop_tol;
        prev_norm = norm;
        if done {
            return Ok(MeanLimit { value: norm, converged: true, iterations: index });
        }
    }
    Ok(MeanLimit { value: prev_norm, converged: false, iterations: index })
}

/// Closed-form n-th mean iterate for operators with `ker(T^*)` contained in
/// `ker(T)`:
///
/// `mean^n(T) = 2^-n V sum_j C(n,j) (V^*)^j |T| V^j`.
///
/// Terms are accumulated in descending weight order. Fails with
/// `KernelInclusionViolated` when the kernel hypothesis does not hold.
pub fn binomial_iterate(t: &CMatrix, n: usize) -> Result<CMatrix, TransformError> {
    let inclusion = classes::kernel_inclusion_check(t, DEFAULT_CLASS_TOL)?;
    if !inclusion.holds {
        return Err(TransformError::KernelInclusionViolated {
            residual: inclusion.inclusion_residual,
        });
    }
    let parts = canonical_polar(t)?;
    let v = &parts.isometry_part;
    let vadj = v.adjoint();
    let window = mean_pmf_window(n);
    let dim = t.rows();

    // Walk j upward computing M_j = (V^*)^j P V^j, stash the windowed terms,
    // then sum them largest-weight first.
    let mut m = parts.modulus.clone();
    let mut terms: Vec<CMatrix> = Vec::with_capacity(window.weights.len());
    for j in 0..=window.j_hi() {
        if j > 0 {
            m = vadj.matmul(&m).matmul(v);
        }
        if j >= window.j_lo {
            terms.push(m.clone());
        }
    }
    let mut acc = CMatrix::zeros(dim, dim);
    for &k in &window.order {
        acc = acc.add(&terms[k].scale_re(window.weights[k]));
    }
    Ok(v.matmul(&acc))
}

/// Closed-form n-th mean iterate of the rank-one operator `x (x) y`
/// (acting as `u -> <u, y> x`):
///
/// `mean^n(x (x) y) = (2^-n x + (1 - 2^-n) (<x,y>/||y||^2) y) (x) y`.
pub fn rank_one_mean_iterate(x: &[C64], y: &[C64], n: usize) -> Result<CMatrix, TransformError> {
    if vec_norm(x) == 0.0 || vec_norm(y) == 0.0 {
        return Err(TransformError::ZeroVector);
    }
    let ny2 = y.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let c = inner(x, y) / ny2;
    let half_n = (-(n as f64)).exp2();
    let coeff = c.scale(1.0 - half_n);
    let a: Vec<C64> = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| xi.scale(half_n) + coeff * yi)
        .collect();
    Ok(rank_one(&a, y))
}

/// Mean transform of a partial isometry `V`: `(I + V^* V) V / 2`, again a
/// weighted version of `V`. Rejects inputs that are not partial isometries.
pub fn partial_isometry_mean(v: &CMatrix) -> Result<CMatrix, TransformError> {
    let residual = classes::partial_isometry_residual(v)?;
    if residual > DEFAULT_CLASS_TOL {
        return Err(TransformError::NotPartialIsometry { residual, tol: DEFAULT_CLASS_TOL });
    }
    let n = v.rows();
    let weight = CMatrix::identity(n).add(&v.adjoint().matmul(v)).scale_re(0.5);
    Ok(weight.matmul(v))
}
