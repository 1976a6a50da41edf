//! Tolerance-based predicates for the operator classes the transforms act on.
//!
//! Each predicate has a residual form (a scale-normalized nonnegative number,
//! 0 for exact members) and a boolean form (`residual <= tol`). The exact
//! definitions are algebraic identities; the tolerances are numerical policy,
//! so every residual is divided by `(1 + ||T||)^d` where `d` is the
//! homogeneity degree of the defining expression. That makes one default
//! tolerance meaningful across scales.
//!
//! In finite dimension the classes collapse more than in general:
//! hyponormal matrices are already normal (the self-commutator is positive
//! semidefinite with zero trace). The residuals still differ, and the
//! implication chain normal => quasinormal => hyponormal => semi-hyponormal
//! is enforced on the reported booleans.

use crate::cmatrix::{vec_norm, CMatrix};
use crate::eig::{hermitian_eig, op_distance, operator_norm, psd_power, LinalgError};
use crate::polar::{canonical_polar, mean_from_parts, TransformError};
use crate::C64;
use serde::Serialize;
use std::collections::BTreeMap;

/// Default tolerance for every class predicate.
pub const DEFAULT_CLASS_TOL: f64 = 1e-8;

/// `||T*T - TT*|| / (1+||T||)^2`; zero exactly for normal operators.
pub fn normal_residual(t: &CMatrix) -> Result<f64, LinalgError> {
    let gram = t.adjoint().matmul(t);
    let cogram = t.matmul(&t.adjoint());
    let scale = 1.0 + operator_norm(t)?;
    Ok(op_distance(&gram, &cogram)? / (scale * scale))
}

/// True iff `T` commutes with `T*T` at tolerance; normality implies it.
pub fn is_normal(t: &CMatrix, tol: f64) -> Result<bool, LinalgError> {
    Ok(normal_residual(t)? <= tol)
}

/// `||T(T*T) - (T*T)T|| / (1+||T||)^3`; zero exactly for quasinormal operators.
pub fn quasinormal_residual(t: &CMatrix) -> Result<f64, LinalgError> {
    let gram = t.adjoint().matmul(t);
    let comm = t.matmul(&gram).sub(&gram.matmul(t));
    let scale = 1.0 + operator_norm(t)?;
    Ok(operator_norm(&comm)? / (scale * scale * scale))
}

/// True iff `T` commutes with `T*T` at tolerance.
pub fn is_quasinormal(t: &CMatrix, tol: f64) -> Result<bool, LinalgError> {
    Ok(quasinormal_residual(t)? <= tol)
}

/// Smallest eigenvalue of `(T*T)^p - (TT*)^p` (unscaled); nonnegative
/// exactly when `T` is p-hyponormal.
pub fn p_hyponormal_witness(t: &CMatrix, p: f64) -> Result<f64, LinalgError> {
    let gram = t.adjoint().matmul(t);
    let cogram = t.matmul(&t.adjoint());
    let diff = psd_power(&gram, p)?.sub(&psd_power(&cogram, p)?);
    let eig = hermitian_eig(&diff)?;
    Ok(eig.values.first().copied().unwrap_or(0.0))
}

/// Scaled p-hyponormality violation: `max(0, -witness) / (1+||T||)^(2p)`.
pub fn p_hyponormal_residual(t: &CMatrix, p: f64) -> Result<f64, LinalgError> {
    let witness = p_hyponormal_witness(t, p)?;
    let scale = (1.0 + operator_norm(t)?).powf(2.0 * p);
    Ok((-witness).max(0.0) / scale)
}

/// True iff `(T*T)^p >= (TT*)^p` holds at tolerance, `p` in `(0, 1]`.
pub fn is_p_hyponormal(t: &CMatrix, p: f64, tol: f64) -> Result<bool, LinalgError> {
    Ok(p_hyponormal_residual(t, p)? <= tol)
}

/// Hyponormality (`p = 1`) violation.
pub fn hyponormal_residual(t: &CMatrix) -> Result<f64, LinalgError> {
    p_hyponormal_residual(t, 1.0)
}

/// Semi-hyponormality (`p = 1/2`, i.e. `|T| >= |T*|`) violation.
pub fn semi_hyponormal_residual(t: &CMatrix) -> Result<f64, LinalgError> {
    p_hyponormal_residual(t, 0.5)
}

/// `||V(V*V) - V|| / (1+||V||)`; zero exactly for partial isometries.
pub fn partial_isometry_residual(v: &CMatrix) -> Result<f64, LinalgError> {
    let vvv = v.matmul(&v.adjoint()).matmul(v);
    let scale = 1.0 + operator_norm(v)?;
    Ok(op_distance(&vvv, v)? / scale)
}

/// True iff `V V* V = V` at tolerance.
pub fn is_partial_isometry(v: &CMatrix, tol: f64) -> Result<bool, LinalgError> {
    Ok(partial_isometry_residual(v)? <= tol)
}

/// Verdict of [`kernel_inclusion_check`]: does `ker(T*)` sit inside `ker(T)`?
///
/// The direct check maps an orthonormal basis of the numerical null space of
/// `T*` through the modulus `P = |T|` (as `ker T = ker P`, with
/// `||P u|| = ||T u||`). Three equivalent formulations are measured; they
/// must agree for a clean verdict:
///
/// 1. the inclusion itself (`inclusion_residual`),
/// 2. `V V* P = P` and `P V V* = P` (`projection_residual`),
/// 3. `V V* V* = V*`, i.e. `ran V*` inside `ran V` (`range_residual`).
#[derive(Debug, Clone, Serialize)]
pub struct KernelInclusion {
    pub holds: bool,
    /// Whether the three formulations return the same boolean at `tol`.
    pub lemma_consistent: bool,
    /// `max ||P u|| / (1+||T||)` over the null basis `u` of `T*`.
    pub inclusion_residual: f64,
    /// `max(||V V* P - P||, ||P V V* - P||) / (1+||T||)`.
    pub projection_residual: f64,
    /// `||V V* V* - V*||` (V has unit scale already).
    pub range_residual: f64,
    /// Dimension of the numerical null space of `T*`.
    pub cokernel_dim: usize,
}

/// Checks `ker(T*) ⊆ ker(T)` and the agreement of its equivalent forms.
pub fn kernel_inclusion_check(t: &CMatrix, tol: f64) -> Result<KernelInclusion, TransformError> {
    let parts = canonical_polar(t)?;
    let n = t.rows();
    let scale = 1.0 + operator_norm(t)?;

    let cogram = t.matmul(&t.adjoint());
    let eig = hermitian_eig(&cogram)?;
    let tadj = t.adjoint();
    let mut inclusion_residual = 0.0f64;
    let mut cokernel_dim = 0usize;
    for k in 0..n {
        let u: Vec<C64> = (0..n).map(|i| eig.vectors.get(i, k)).collect();
        // Score the mode by ||T* u|| directly; the Gram eigenvalue would
        // bury values below 1e-8 * ||T|| in rounding noise.
        if vec_norm(&tadj.mul_vec(&u)) <= parts.rank_tol {
            cokernel_dim += 1;
            let pu = parts.modulus.mul_vec(&u);
            inclusion_residual = inclusion_residual.max(vec_norm(&pu) / scale);
        }
    }

    let v = &parts.isometry_part;
    let p = &parts.modulus;
    let vv = v.matmul(&v.adjoint());
    let left = op_distance(&vv.matmul(p), p)?;
    let right = op_distance(&p.matmul(&vv), p)?;
    let projection_residual = left.max(right) / scale;
    let vadj = v.adjoint();
    let range_residual = op_distance(&vv.matmul(&vadj), &vadj)?;

    let holds = inclusion_residual <= tol;
    let by_projection = projection_residual <= tol;
    let by_range = range_residual <= tol;
    Ok(KernelInclusion {
        holds,
        lemma_consistent: holds == by_projection && by_projection == by_range,
        inclusion_residual,
        projection_residual,
        range_residual,
        cokernel_dim,
    })
}

/// Class membership summary for one operator.
#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub normal: bool,
    pub quasinormal: bool,
    pub hyponormal: bool,
    pub semi_hyponormal: bool,
    pub partial_isometry: bool,
    /// Scale-normalized residual behind each verdict, keyed by predicate.
    pub witnesses: BTreeMap<String, f64>,
    /// True when a borderline residual broke the implication chain and the
    /// booleans were promoted to restore normal => quasinormal =>
    /// hyponormal => semi-hyponormal.
    pub chain_adjusted: bool,
}

/// Evaluates every class predicate at one tolerance and enforces the
/// implication chain on the reported booleans.
pub fn classify(t: &CMatrix, tol: f64) -> Result<ClassReport, LinalgError> {
    let r_normal = normal_residual(t)?;
    let r_quasi = quasinormal_residual(t)?;
    let r_hypo = hyponormal_residual(t)?;
    let r_semi = semi_hyponormal_residual(t)?;
    let r_pi = partial_isometry_residual(t)?;

    let normal = r_normal <= tol;
    let mut quasinormal = r_quasi <= tol;
    let mut hyponormal = r_hypo <= tol;
    let mut semi_hyponormal = r_semi <= tol;
    let partial_isometry = r_pi <= tol;

    let raw = (quasinormal, hyponormal, semi_hyponormal);
    quasinormal |= normal;
    hyponormal |= quasinormal;
    semi_hyponormal |= hyponormal;
    let chain_adjusted = raw != (quasinormal, hyponormal, semi_hyponormal);

    let mut witnesses = BTreeMap::new();
    witnesses.insert("normal".to_string(), r_normal);
    witnesses.insert("quasinormal".to_string(), r_quasi);
    witnesses.insert("hyponormal".to_string(), r_hypo);
    witnesses.insert("semi_hyponormal".to_string(), r_semi);
    witnesses.insert("partial_isometry".to_string(), r_pi);

    Ok(ClassReport {
        normal,
        quasinormal,
        hyponormal,
        semi_hyponormal,
        partial_isometry,
        witnesses,
        chain_adjusted,
    })
}

/// Fixed-point residual of the mean transform, `||mean(T) - T|| / (1+||T||)`.
/// Quasinormal operators have residual at rounding level.
pub fn mean_fixed_point_residual(t: &CMatrix) -> Result<f64, TransformError> {
    let parts = canonical_polar(t)?;
    let m = mean_from_parts(&parts);
    let scale = 1.0 + operator_norm(t)?;
    Ok(op_distance(&m, t)? / scale)
}
