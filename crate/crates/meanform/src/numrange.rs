//! Spectral radius, numerical range boundary, and the disk-intersection
//! membership oracle.
//!
//! The numerical range `W(T) = { <Tx, x> : ||x|| = 1 }` is convex and compact;
//! its support function in direction `theta` is the top eigenvalue of
//! `Re(e^{-i theta} T)`, and the numerical radius is the maximum of that
//! support over directions. The boundary is sampled on a rotation grid, then
//! the support maximum is sharpened by golden-section search so the reported
//! radius does not depend on the grid step.
//!
//! Membership in the closure of `W(T)` is tested against the classical
//! intersection-of-disks formula: `mu` belongs to it only if
//! `|mu - lambda| <= ||T - lambda I||` for every complex `lambda`. A finite
//! lambda grid makes this a necessary condition; [`DiskOracle`] precomputes
//! the disk radii once per operator so many points can be tested cheaply.

use crate::cmatrix::{inner, CMatrix, MatrixError};
use crate::eig::{
    eigenvalues_general, hermitian_eig, operator_norm, psd_power, LinalgError,
    GENERAL_EIG_MAX_DIM,
};
use crate::polar::{canonical_polar, TransformError};
use crate::C64;
use rayon::prelude::*;
use std::f64::consts::TAU;

/// Default angular resolution of the rotation grid.
pub const DEFAULT_RANGE_POINTS: usize = 360;
/// Angular resolution used inside [`msy_inequality_check`].
pub const MSY_RANGE_POINTS: usize = 720;
/// Golden-section refinement steps for the support maximum.
const REFINE_ITERS: usize = 48;
/// Maximum squarings in the Gelfand spectral-radius iteration.
pub const GELFAND_MAX_SQUARINGS: usize = 40;
/// Relative agreement between consecutive Gelfand estimates.
pub const GELFAND_REL_TOL: f64 = 1e-8;

/// One direction sample of the numerical range boundary.
#[derive(Debug, Clone, Copy)]
pub struct BoundarySample {
    /// Direction angle in `[0, 2pi)` (refinement extras may repeat a basin).
    pub theta: f64,
    /// Support value: top eigenvalue of `Re(e^{-i theta} T)`.
    pub support: f64,
    /// Boundary point `<T x, x>` for the top eigenvector `x`.
    pub point: C64,
}

/// Sampled boundary of the numerical range.
#[derive(Debug, Clone)]
pub struct NumRangeBoundary {
    /// Uniform grid samples followed by golden-section refinement extras.
    pub samples: Vec<BoundarySample>,
    /// Numerical radius estimate: max `|point|` over samples.
    pub num_radius: f64,
}

fn support_sample(t: &CMatrix, theta: f64) -> Result<BoundarySample, LinalgError> {
    let rotated = t.scale(C64::from_polar(1.0, -theta));
    let h = rotated.add(&rotated.adjoint()).scale_re(0.5);
    let eig = hermitian_eig(&h)?;
    let n = t.rows();
    let top = n - 1;
    let x: Vec<C64> = (0..n).map(|i| eig.vectors.get(i, top)).collect();
    let point = inner(&t.mul_vec(&x), &x);
    Ok(BoundarySample { theta, support: eig.values[top], point })
}

/// Samples the numerical range boundary on an `m`-point rotation grid
/// (`m` is clamped up to 8) and refines the support maximum.
pub fn numerical_range_boundary(
    t: &CMatrix,
    m: usize,
) -> Result<NumRangeBoundary, LinalgError> {
    if !t.is_square() {
        return Err(MatrixError::NotSquare { rows: t.rows(), cols: t.cols() }.into());
    }
    let m = m.max(8);
    let mut samples: Vec<BoundarySample> = (0..m)
        .into_par_iter()
        .map(|j| support_sample(t, TAU * j as f64 / m as f64))
        .collect::<Result<_, _>>()?;

    // Golden-section search for the support maximum inside the bracketing
    // grid cell; the refined sample pins the numerical radius independently
    // of the grid step.
    let (best, _) = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.support.total_cmp(&b.1.support))
        .map(|(j, s)| (j, s.support))
        .expect("grid is nonempty");
    let step = TAU / m as f64;
    let center = samples[best].theta;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (center - step, center + step);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut sc = support_sample(t, c)?;
    let mut sd = support_sample(t, d)?;
    for _ in 0..REFINE_ITERS {
        if sc.support >= sd.support {
            b = d;
            d = c;
            sd = sc;
            c = b - inv_phi * (b - a);
            sc = support_sample(t, c)?;
        } else {
            a = c;
            c = d;
            sc = sd;
            d = a + inv_phi * (b - a);
            sd = support_sample(t, d)?;
        }
    }
    let mut refined = support_sample(t, 0.5 * (a + b))?;
    refined.theta = refined.theta.rem_euclid(TAU);
    samples.push(refined);

    let num_radius = samples.iter().map(|s| s.point.norm()).fold(0.0, f64::max);
    Ok(NumRangeBoundary { samples, num_radius })
}

/// Numerical radius `w(T)` via [`numerical_range_boundary`].
pub fn numerical_radius(t: &CMatrix, m: usize) -> Result<f64, LinalgError> {
    Ok(numerical_range_boundary(t, m)?.num_radius)
}

/// Spectral radius: direct eigenvalues up to dimension 64, Gelfand's
/// renormalized squaring `||T^(2^k)||^(1/2^k)` above.
pub fn spectral_radius(t: &CMatrix) -> Result<f64, LinalgError> {
    if !t.is_square() {
        return Err(MatrixError::NotSquare { rows: t.rows(), cols: t.cols() }.into());
    }
    if t.rows() <= GENERAL_EIG_MAX_DIM {
        let eigs = eigenvalues_general(t)?;
        return Ok(eigs.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    gelfand_radius(t)
}

fn gelfand_radius(t: &CMatrix) -> Result<f64, LinalgError> {
    let n0 = operator_norm(t)?;
    if n0 == 0.0 {
        return Ok(0.0);
    }
    // Keep the iterate at unit norm; the accumulated logarithm carries the
    // true magnitude so squaring can neither overflow nor underflow.
    let mut a = t.scale_re(1.0 / n0);
    let mut log_norm = n0.ln();
    let mut prev = n0;
    let mut last_gap = f64::INFINITY;
    // Powers below the dimension say nothing about the radius (a nilpotent
    // block keeps norm 1 until it collapses), so the relative stop is only
    // trusted once 2^k reaches the dimension.
    let min_squarings = usize::BITS as usize - t.rows().leading_zeros() as usize;
    for k in 1..=GELFAND_MAX_SQUARINGS {
        let sq = a.matmul(&a);
        let norm = operator_norm(&sq)?;
        if norm == 0.0 {
            return Ok(0.0);
        }
        log_norm = 2.0 * log_norm + norm.ln();
        a = sq.scale_re(1.0 / norm);
        let est = (log_norm / (1u64 << k) as f64).exp();
        last_gap = (est - prev).abs();
        if k >= min_squarings && last_gap <= GELFAND_REL_TOL * est.max(f64::MIN_POSITIVE) {
            return Ok(est);
        }
        prev = est;
    }
    Err(LinalgError::NoConvergence { residual: last_gap, iterations: GELFAND_MAX_SQUARINGS })
}

/// Default lambda grid for the disk-intersection formula: 64 equispaced
/// points on the circle `|lambda| = 2 ||T||`, plus the origin.
pub fn default_lambda_grid(t: &CMatrix) -> Result<Vec<C64>, LinalgError> {
    let r = 2.0 * operator_norm(t)?;
    let mut grid: Vec<C64> = (0..64)
        .map(|j| C64::from_polar(r, TAU * j as f64 / 64.0))
        .collect();
    grid.push(C64::new(0.0, 0.0));
    Ok(grid)
}

/// Precomputed disks `{ z : |z - center| <= ||T - center I|| }` whose
/// intersection contains the closure of `W(T)`.
#[derive(Debug, Clone)]
pub struct DiskOracle {
    pub centers: Vec<C64>,
    pub radii: Vec<f64>,
}

impl DiskOracle {
    /// Computes one disk radius (an operator norm) per grid center.
    pub fn new(t: &CMatrix, centers: &[C64]) -> Result<Self, LinalgError> {
        let n = t.rows();
        let radii: Vec<f64> = centers
            .par_iter()
            .map(|&lam| {
                let shifted = t.sub(&CMatrix::identity(n).scale(lam));
                operator_norm(&shifted)
            })
            .collect::<Result<_, _>>()?;
        Ok(DiskOracle { centers: centers.to_vec(), radii })
    }

    /// Signed margin: `max_j (|mu - center_j| - radius_j)`; nonpositive
    /// values lie in every disk.
    pub fn margin(&self, mu: C64) -> f64 {
        self.centers
            .iter()
            .zip(&self.radii)
            .map(|(&c, &r)| (mu - c).norm() - r)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Membership at slack `tol`.
    pub fn contains(&self, mu: C64, tol: f64) -> bool {
        self.margin(mu) <= tol
    }

    /// True when the verdict sits within ten tolerances of the threshold —
    /// finite-grid membership is a necessary condition only, so close calls
    /// deserve flagging rather than trust.
    pub fn near_threshold(&self, mu: C64, tol: f64) -> bool {
        self.margin(mu).abs() <= 10.0 * tol
    }
}

/// True iff `|mu - lambda| <= ||T - lambda I|| + tol` for every grid lambda —
/// a necessary condition for `mu` to lie in the closure of `W(T)`.
pub fn in_closure_numrange(
    t: &CMatrix,
    mu: C64,
    lambda_grid: &[C64],
    tol: f64,
) -> Result<bool, LinalgError> {
    Ok(DiskOracle::new(t, lambda_grid)?.contains(mu, tol))
}

/// A `lhs <= rhs` pair for the norm and radius inequalities.
#[derive(Debug, Clone, Copy)]
pub struct InequalityPair {
    pub lhs: f64,
    pub rhs: f64,
}

/// Compares `||P V - lambda I||` (polar factors in reversed order) against
/// `||T - lambda I||`; the first never exceeds the second.
pub fn support_inequality_check(
    t: &CMatrix,
    lambda: C64,
) -> Result<InequalityPair, TransformError> {
    let parts = canonical_polar(t)?;
    let pv = parts.modulus.matmul(&parts.isometry_part);
    let shift = CMatrix::identity(t.rows()).scale(lambda);
    let lhs = operator_norm(&pv.sub(&shift))?;
    let rhs = operator_norm(&t.sub(&shift))?;
    Ok(InequalityPair { lhs, rhs })
}

/// Numerical-radius comparison `w(A^{1/2} X B^{1/2})` against
/// `w((A^a X B^{1-a} + A^{1-a} X B^a)/2)` for PSD `A`, `B` and `a` in
/// `[0, 1]`. Powers at exponent 0 are the identity.
///
/// `lhs <= rhs` is guaranteed when `B = A` — the instance behind the radius
/// chain `w(aluthge(T)) <= w(mean(T))`, with `A = |T|` and `X = V`. With two
/// distinct operators the comparison can genuinely fail (see the unit
/// tests for a 2x2 counterexample), so callers asserting the inequality
/// should stay in the one-operator regime.
pub fn msy_inequality_check(
    a: &CMatrix,
    b: &CMatrix,
    x: &CMatrix,
    alpha: f64,
) -> Result<InequalityPair, LinalgError> {
    if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
        return Err(LinalgError::InvalidExponent { p: alpha });
    }
    let lhs_matrix = psd_power(a, 0.5)?.matmul(x).matmul(&psd_power(b, 0.5)?);
    let lhs = numerical_radius(&lhs_matrix, MSY_RANGE_POINTS)?;
    if alpha == 0.5 {
        return Ok(InequalityPair { lhs, rhs: lhs });
    }
    let weighted = |p: f64| -> Result<CMatrix, LinalgError> {
        let left = if p == 0.0 { x.clone() } else { psd_power(a, p)?.matmul(x) };
        Ok(if p == 1.0 { left } else { left.matmul(&psd_power(b, 1.0 - p)?) })
    };
    let rhs_matrix = weighted(alpha)?.add(&weighted(1.0 - alpha)?).scale_re(0.5);
    let rhs = numerical_radius(&rhs_matrix, MSY_RANGE_POINTS)?;
    Ok(InequalityPair { lhs, rhs })
}
