//! One verification routine per suite: each draws a random instance from
//! its ensemble, evaluates the claimed identity or inequality, and returns
//! a residual plus a violation verdict and a JSON witness.
//!
//! Residual conventions: inequality suites report the tolerance-relevant
//! positive excess (scale-normalized to the stated homogeneity), identity
//! suites the scale-normalized defect, and the golden-example suite a
//! tolerance-normalized worst ratio (1.0 = exactly at tolerance).

use super::generators as gen;
use super::{SuiteId, TrialOutcome};
use crate::classes::{
    classify, kernel_inclusion_check, mean_fixed_point_residual, DEFAULT_CLASS_TOL,
};
use crate::cmatrix::{inner, rank_one, vec_norm, CMatrix};
use crate::eig::{
    eigenvalues_general, hermitian_eig, min_singular_value, operator_norm, psd_power,
};
use crate::matrix_doc::MatrixDocument;
use crate::numrange::{
    default_lambda_grid, msy_inequality_check, numerical_radius, spectral_radius,
    support_inequality_check, DiskOracle,
};
use crate::polar::{
    aluthge_transform, binomial_iterate, canonical_polar, mean_from_parts, mean_transform,
    partial_isometry_mean, rank_one_mean_iterate, rank_tolerance,
};
use crate::weights::{
    exp_weights, parse_weight_spec, shift_aluthge_weights, shift_mean_iterate_weights,
    shift_mean_limit, shift_mean_weights, shift_spectral_radius, WeightSequence,
};
use crate::C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// Default violation threshold for scale-normalized residuals.
const DEFAULT_TOL: f64 = 1e-8;
/// Numerical-radius sampling density inside the radius-chain suites.
const RADIUS_POINTS: usize = 96;

pub(super) fn run_trial(
    suite: SuiteId,
    trial: u64,
    seed: u64,
    dims: (usize, usize),
) -> Result<TrialOutcome, String> {
    let mut rng = gen::trial_rng(seed, trial);
    match suite {
        SuiteId::KernelEquality => kernel_equality(trial, &mut rng, dims),
        SuiteId::Invertibility => invertibility(trial, &mut rng, dims),
        SuiteId::Equivariance => equivariance(trial, &mut rng, dims),
        SuiteId::NormChain => norm_chain(trial, &mut rng, dims),
        SuiteId::Heinz => heinz(trial, &mut rng, dims),
        SuiteId::PartialIsometrySpectrum => partial_isometry_spectrum(trial, &mut rng, dims),
        SuiteId::RankOne => rank_one_suite(trial, &mut rng, dims),
        SuiteId::LemmaEquivalences => lemma_equivalences(trial, &mut rng, dims),
        SuiteId::BinomialFormula => binomial_formula(trial, &mut rng, dims),
        SuiteId::SameMeanLimit => same_mean_limit(trial, &mut rng, dims),
        SuiteId::SemihypoFixedPoint => semihypo_fixed_point(trial, &mut rng, dims),
        SuiteId::NumrangeInclusion => numrange_inclusion(trial, &mut rng, dims),
        SuiteId::SupportInequality => support_inequality(trial, &mut rng, dims),
        SuiteId::WChain => w_chain(trial, &mut rng, dims),
        SuiteId::Msy => msy(trial, &mut rng, dims),
        SuiteId::ShiftRadiusMonotone => shift_radius_monotone(trial, &mut rng),
        SuiteId::ShiftMeanLimitBridge => shift_mean_limit_bridge(trial, &mut rng),
        SuiteId::ShiftConvergent => shift_convergent(trial, &mut rng),
        SuiteId::GoldenExamples => golden_examples(trial),
        SuiteId::SelfTest => self_test(trial, &mut rng, dims),
    }
}

fn err_str<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn draw_dim(rng: &mut ChaCha8Rng, dims: (usize, usize), min_dim: usize) -> usize {
    let lo = dims.0.max(min_dim);
    let hi = dims.1.max(lo);
    rng.random_range(lo..=hi)
}

fn matrix_json(t: &CMatrix) -> Value {
    serde_json::to_value(MatrixDocument::from_matrix(t)).unwrap_or(Value::Null)
}

fn conj_matrix(t: &CMatrix) -> CMatrix {
    CMatrix::from_fn(t.rows(), t.cols(), |i, j| t.get(i, j).conj())
}

/// Orthonormal basis of the numerical null space of `t`.
fn null_basis(t: &CMatrix) -> Result<Vec<Vec<C64>>, String> {
    let gram = t.adjoint().matmul(t);
    let eig = hermitian_eig(&gram).map_err(err_str)?;
    let tol = rank_tolerance(operator_norm(t).map_err(err_str)?);
    let mut basis = Vec::new();
    for k in 0..t.rows() {
        let v: Vec<C64> = (0..t.rows()).map(|i| eig.vectors.get(i, k)).collect();
        // Score by ||T v|| directly: the Gram eigenvalue loses half its
        // digits near zero and would miss most kernel modes at this tol.
        if vec_norm(&t.mul_vec(&v)) <= tol {
            basis.push(v);
        }
    }
    Ok(basis)
}

/// Worst distance of a greedy nearest-neighbour matching between two
/// equal-length eigenvalue multisets.
fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for &za in a {
        let best = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, &zb)| (k, (za - zb).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1));
        match best {
            Some((k, dist)) => {
                used[k] = true;
                worst = worst.max(dist);
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

/// Kernel equality `ker(mean(T)) = ker(T)`, including the zero matrix and
/// the "mean is zero only for zero" consequence.
fn kernel_equality(
    trial: u64,
    rng: &mut ChaCha8Rng,
    dims: (usize, usize),
) -> Result<TrialOutcome, String> {
    let d = draw_dim(rng, dims, 2);
    let rank = rng.random_range(1..d);
    let t = gen::rank_deficient(rng, d, rank);
    let scale = 1.0 + operator_norm(&t).map_err(err_str)?;
    let that = mean_transform(&t).map_err(err_str)?;

    let zero_defect =
        operator_norm(&mean_transform(&CMatrix::zeros(d, d)).map_err(err_str)?).map_err(err_str)?;
    let n_t = null_basis(&t)?;
    let n_that = null_basis(&that)?;
    let forward = n_t
        .iter()
        .map(|u| vec_norm(&that.mul_vec(u)))
        .fold(0.0f64, f64::max)
        / scale;
    let backward = n_that
        .iter()
        .map(|u| vec_norm(&t.mul_vec(u)))
        .fold(0.0f64, f64::max)
        / scale;
    let mean_is_nonzero = operator_norm(&that).map_err(err_str)? > 1e-12 * scale;

    let residual = forward.max(backward).max(zero_defect);
    let violation =
        residual > DEFAULT_TOL || !mean_is_nonzero || n_t.len() != n_that.len();
    Ok(TrialOutcome {
        residual,
        violation,
        witness: json!({
            "trial": trial,
            "dim": d,
            "rank": rank,
            "kernel_dim": n_t.len(),
            "kernel_dim_mean": n_that.len(),
            "residual": residual,
            "matrix": matrix_json(&t),
        }),
    })
}

/// Invertibility equivalence: `T` invertible iff `mean(T)` invertible
/// (with unitary polar factor and invertible modulus on the way), and rank
/// preservation for deficient draws.
fn invertibility(
    trial: u64,
    rng: &mut ChaCha8Rng,
    dims: (usize, usize),
) -> Result<TrialOutcome, String> {
    let d = draw_dim(rng, dims, 2);
    if trial % 2 == 0 {
        let t = gen::invertible(rng, d)?;
        let parts = canonical_polar(&t).map_err(err_str)?;
        let that = mean_from_parts(&parts);
        let smin_mean = min_singular_value(&that).map_err(err_str)?;
        let v = &parts.isometry_part;
        let unitary_defect = operator_norm(
            &v.adjoint().matmul(v).sub(&CMatrix::identity(d)),
        )
        .map_err(err_str)?;
        let modulus_min = hermitian_eig(&parts.modulus).map_err(err_str)?.values[0];
        let tol = parts.rank_tol;
        let residual = unitary_defect
            .max((tol - smin_mean).max(0.0) / tol)
            .max((tol - modulus_min).max(0.0) / tol);
        let violation =
            smin_mean <= tol || modulus_min <= tol || unitary_defect > DEFAULT_TOL;
        Ok(TrialOutcome {
            residual,
            violation,
            witness: json!({
                "trial": trial,
                "dim": d,
                "regime": "invertible",
                "sigma_min_mean": smin_mean,
                "unitary_defect": unitary_defect,
                "matrix": matrix_json(&t),
            }),
        })
    } else {
        let rank = rng.random_range(1..d);
        let t = gen::rank_deficient(rng, d, rank);
        let that = mean_transform(&t).map_err(err_str)?;
        let rank_mean = canonical_polar(&that).map_err(err_str)?.numerical_rank;
        let residual = (rank_mean as f64 - rank as f64).abs();
        Ok(TrialOutcome {
            residual,
            violation: rank_mean != rank,
            witness: json!({
                "trial": trial,
                "dim": d,
                "regime": "rank-deficient",
                "rank": rank,
                "rank_mean": rank_mean,
                "matrix": matrix_json(&t),
            }),
        })
    }
}

/// Equivariance under unitary conjugation and under entrywise complex
/// conjugation (the anti-unitary case factors through these two).
fn equivariance(
    trial: u64,
    rng: &mut ChaCha8Rng,
    dims: (usize, usize),
) -> Result<TrialOutcome, String> {
    let d = draw_dim(rng, dims, 2);
    let t = gen::ginibre(rng, d);
    let u = gen::haar_unitary(rng, d);
    let scale = 1.0 + operator_norm(&t).map_err(err_str)?;
    let mean_t = mean_transform(&t).map_err(err_str)?;

    let conjugated = u.matmul(&t).matmul(&u.adjoint());
    let unitary_defect = operator_norm(
        &mean_transform(&conjugated)
            .map_err(err_str)?
            .sub(&u.matmul(&mean_t).matmul(&u.adjoint())),
    )
    .map_err(err_str)?
        / scale;
    let conj_defect = operator_norm(
        &mean_transform(&conj_matrix(&t))
            .map_err(err_str)?
            .sub(&conj_matrix(&mean_t)),
    )
    .map_err(err_str)?
        / scale;

    let residual = unitary_defect.max(conj_defect);
    Ok(TrialOutcome {
        residual,
        violation: residual > DEFAULT_TOL,
        witness: json!({
            "trial": trial,
            "dim": d,
            "unitary_defect": unitary_defect,
            "conjugation_defect": conj_defect,
            "matrix": matrix_json(&t),
        }),
    })
}

/// Norm chain `||aluthge(T)|| <= ||mean(T)|| <= ||T||` plus the spectral
/// radius consequence `r(T) <= ||mean(T)||`.
fn norm_chain(
    trial: u64,
    rng: &mut ChaCha8Rng,
    dims: (usize, usize),
) -> Result<TrialOutcome, String> {
    let d = draw_dim(rng, dims, 2);
    let t = gen::ginibre(rng, d);
    let n_t = operator_norm(&t).map_err(err_str)?;
    let n_mean = operator_norm(&mean_transform(&t).map_err(err_str)?).map_err(err_str)?;
    let n_aluthge =
        operator_norm(&aluthge_transform(&t, 0.5).map_err(err_str)?).map_err(err_str)?;
    let radius = spectral_radius(&t).map_err(err_str)?;

    let scale = 1.0 + n_t;
    let residual = (n_aluthge - n_mean)
        .max(n_mean - n_t)
        .max(radius - n_mean)
        .max(0.0)
        / scale;
    Ok(TrialOutcome {
        residual,
        violation: residual > DEFAULT_TOL,
        witness: json!({
            "trial": trial,
            "dim": d,
            "norm": n_t,
            "norm_mean": n_mean,
            "norm_aluthge": n_aluthge,
            "spectral_radius": radius,
            "matrix": matrix_json(&t),
        }),
    })
}

/// The positive-operator norm inequality
/// `||A^(1/2) X B^(1/2)|| <= ||(AX + XB)/2||`.
fn heinz(trial: u64, rng: &mut ChaCha8Rng, dims: (usize, usize)) -> Result<TrialOutcome, String> {
    let d = draw_dim(rng, dims, 2);
    let a = gen::psd_gram(rng, d);
    let b = gen::psd_gram(rng, d);
    let x = gen::ginibre(rng, d);
    let a_half = psd_power(&a, 0.5).map_err(err_str)?;
    let b_half = psd_power(&b, 0.5).map_err(err_str)?;
    let lhs = operator_norm(&a_half.matmul(&x).matmul(&b_half)).map_err(err_str)?;
    let rhs = operator_norm(&a.matmul(&x).add(&x.matmul(&b)).scale_re(0.5)).map_err(err_str)?;

    let scale = 1.0
        + operator_norm(&a).map_err(err_str)? * operator_norm(&x).map_err(err_str)?
        + operator_norm(&x).map_err(err_str)? * operator_norm(&b).map_err(err_str)?;
    let residual = (lhs - rhs).max(0.0) / scale;
    Ok(TrialOutcome {
        residual,
        violation: residual > DEFAULT_TOL,
        witness: json!({
            "trial": trial,
            "dim": d,
            "lhs": lhs,
            "rhs": rhs,
            "a": matrix_json(&a),
            "b": matrix_json(&b),
            "x": matrix_json(&x),
        }),
    })
}

/// Partial isometries: closed form `mean(V) = (I + V*V) V / 2` and
/// spectrum preservation `sigma(V) = sigma(mean(V))` as multisets.
fn partial_isometry_spectrum(
    trial: u64,
    rng: &mut ChaCha8Rng,
    dims: (usize, usize),
) -> Result<TrialOutcome, String> {
    let d = draw_dim(rng, dims, 2);
    let rank = rng.random_range(1..=d);
    let v = gen::partial_isometry(rng, d, rank);
    let vhat = mean_transform(&v).map_err(err_str)?;
    let closed = CMatrix::identity(d)
        .add(&v.adjoint().matmul(&v))
        .matmul(&v)
        .scale_re(0.5);
    let formula_defect = operator_norm(&vhat.sub(&closed)).map_err(err_str)?;
    let dedicated_defect =
        operator_norm(&partial_isometry_mean(&v).map_err(err_str)?.sub(&closed))
            .map_err(err_str)?;
    let spec_v = eigenvalues_general(&v).map_err(err_str)?;
    let spec_vhat = eigenvalues_general(&vhat).map_err(err_str)?;
    let spectrum_distance = multiset_distance(&spec_v, &spec_vhat);

    let residual = formula_defect.max(dedicated_defect).max(spectrum_distance);
    let violation = formula_defect > 1e-10
        || dedicated_defect > 1e-10
        || spectrum_distance > 1e-7;
    Ok(TrialOutcome {
        residual,
        violation,
        witness: json!({
            "trial": trial,
            "dim": d,
            "rank": rank,
            "formula_defect": formula_defect,
            "spectrum_distance": spectrum_distance,
            "matrix": matrix_json(&v),
        }),
    })
}

/// Rank-one operators: closed-form mean iterates, the geometric decay of
/// the distance to the Aluthge transform, and the mean limit `|<x, y>|`.
fn rank_one_suite(
    trial: u64,
    rng: &mut ChaCha8Rng,
    dims: (usize, usize),
) -> Result<TrialOutcome, String> {
    let d = draw_dim(rng, dims, 2);
    let scale_x = rng.random_range(0.5..=2.0f64);
    let scale_y = rng.random_range(0.5..=2.0f64);
    let x: Vec<C64> = gen::unit_vector(rng, d).iter().map(|z| *z * scale_x).collect();
    let y: Vec<C64> = gen::unit_vector(rng, d).iter().map(|z| *z * scale_y).collect();
    let n = rng.random_range(0..=12usize);

    let t = rank_one(&x, &y);
    let scale = 1.0 + operator_norm(&t).map_err(err_str)?;
    let closed = rank_one_mean_iterate(&x, &y, n).map_err(err_str)?;
    let mut iterated = t.clone();
    for _ in 0..n {
        iterated = mean_transform(&iterated).map_err(err_str)?;
    }
    let iterate_defect = operator_norm(&iterated.sub(&closed)).map_err(err_str)? / scale;

    // aluthge(T) = (<x,y>/||y||^2) y (x) y; distance decays exactly as 2^-n.
    let ny2: f64 = y.iter().map(|z| z.norm_sqr()).sum();
    let coeff = inner(&x, &y) / ny2;
    let projected: Vec<C64> = y.iter().map(|z| *z * coeff).collect();
    let delta = rank_one(&projected, &y);
    let detached: Vec<C64> = x
        .iter()
        .zip(projected.iter())
        .map(|(xi, pi)| *xi - *pi)
        .collect();
    let expected_gap = (-(n as f64)).exp2() * vec_norm(&detached) * vec_norm(&y);
    let gap_defect = (operator_norm(&closed.sub(&delta)).map_err(err_str)? - expected_gap)
        .abs()
        / scale;

    let far = rank_one_mean_iterate(&x, &y, 60).map_err(err_str)?;
    let limit_defect =
        (operator_norm(&far).map_err(err_str)? - inner(&x, &y).norm()).abs();

    let residual = iterate_defect.max(gap_defect).max(limit_defect);
    let violation = iterate_defect > 1e-10 || gap_defect > 1e-10 || limit_defect > 1e-8;
    Ok(TrialOutcome {
        residual,
        violation,
        witness: json!({
            "trial": trial,
            "dim": d,
            "n": n,
            "iterate_defect": iterate_defect,
            "limit_defect": limit_defect,
            "matrix": matrix_json(&t),
        }),
    })
}

/// Equivalence of the kernel-inclusion formulations (`ker(T*) ⊆ ker(T)`,
/// the range projection fixing the modulus, the adjoint of the polar
/// factor being quasinormal) and the factored mean formula they license.
fn lemma_equivalences(
    trial: u64,
    rng: &mut ChaCha8Rng,
    dims: (usize, usize),
) -> Result<TrialOutcome, String> {
    let d = draw_dim(rng, dims, 2);
    let (t, expect_holds): (CMatrix, Option<bool>) = match trial % 3 {
        0 => (gen::invertible(rng, d)?, Some(true)),
        1 => {
            // Singular normal draw: kernels of T and T* coincide, so the
            // inclusion holds without invertibility.
            let u = gen::haar_unitary(rng, d);
            let mut eigs: Vec<C64> = (0..d)
                .map(|_| {
                    C64::from_polar(
                        rng.random_range(0.3..=2.0),
                        rng.random_range(0.0..std::f64::consts::TAU),
                    )
                })
                .collect();
            eigs[d - 1] = C64::new(0.0, 0.0);
            (u.matmul(&CMatrix::diag(&eigs)).matmul(&u.adjoint()), Some(true))
        }
        _ => {
            let rank = rng.random_range(1..d);
            (gen::rank_deficient(rng, d, rank), None)
        }
    };
    let report = kernel_inclusion_check(&t, DEFAULT_CLASS_TOL).map_err(err_str)?;
    let scale = 1.0 + operator_norm(&t).map_err(err_str)?;

    let mut residual = if report.holds {
        report.inclusion_residual.max(report.projection_residual)
    } else {
        0.0
    };
    let mut violation = !report.lemma_consistent;
    if let Some(expected) = expect_holds {
        violation |= report.holds != expected;
    }
    if report.holds {
        let parts = canonical_polar(&t).map_err(err_str)?;
        let v = &parts.isometry_part;
        let factored = v
            .matmul(&parts.modulus.add(&v.adjoint().matmul(&parts.modulus).matmul(v)))
            .scale_re(0.5);
        let formula_defect =
            operator_norm(&factored.sub(&mean_transform(&t).map_err(err_str)?))
                .map_err(err_str)?
                / scale;
        residual = residual.max(formula_defect);
        violation |= formula_defect > DEFAULT_TOL;
    }
    Ok(TrialOutcome {
        residual,
        violation,
        witness: json!({
            "trial": trial,
            "dim": d,
            "holds": report.holds,
            "lemma_consistent": report.lemma_consistent,
            "cokernel_dim": report.cokernel_dim,
            "matrix": matrix_json(&t),
        }),
    })
}

/// Binomial expansion of the n-th mean iterate against n applications of
/// the transform, on invertible draws (where the kernel condition holds).
fn binomial_formula(
    trial: u64,
    rng: &mut ChaCha8Rng,
    dims: (usize, usize),
) -> Result<TrialOutcome, String> {
    let d = draw_dim(rng, dims, 2);
    let t = gen::invertible(rng, d)?;
    let n = rng.random_range(0..=10usize);
    let scale = 1.0 + operator_norm(&t).map_err(err_str)?;

    let direct = binomial_iterate(&t, n).map_err(err_str)?;
    let mut iterated = t.clone();
    for _ in 0..n {
        iterated = mean_transform(&iterated).map_err(err_str)?;
    }
    let residual = operator_norm(&direct.sub(&iterated)).map_err(err_str)? / scale;
    Ok(TrialOutcome {
        residual,
        violation: residual > 1e-9,
        witness: json!({
            "trial": trial,
            "dim": d,
            "n": n,
            "residual": residual,
            "matrix": matrix_json(&t),
        }),
    })
}

/// For injective T with injective adjoint, every mean iterate of T and of
/// T* has the same norm, hence both have the same mean limit.
fn same_mean_limit(
    trial: u64,
    rng: &mut ChaCha8Rng,
    dims: (usize, usize),
) -> Result<TrialOutcome, String> {
    let d = draw_dim(rng, dims, 2);
    let t = gen::invertible(rng, d)?;
    let scale = 1.0 + operator_norm(&t).map_err(err_str)?;
    let mut a = t.clone();
    let mut b = t.adjoint();
    let mut residual = 0.0f64;
    for _ in 0..8 {
        a = mean_transform(&a).map_err(err_str)?;
        b = mean_transform(&b).map_err(err_str)?;
        let gap = (operator_norm(&a).map_err(err_str)?
            - operator_norm(&b).map_err(err_str)?)
        .abs();
        residual = residual.max(gap / scale);
    }
    Ok(TrialOutcome {
        residual,
        violation: residual > DEFAULT_TOL,
        witness: json!({
            "trial": trial,
            "dim": d,
            "residual": residual,
            "matrix": matrix_json(&t),
        }),
    })
}

/// Finite-dimensional shadow of the semi-hyponormal fixed-point result:
/// normal matrices are fixed points (in finite dimension semi-hyponormal
/// forces normal, so no sharper matrix ensemble exists), and for shifts,
/// increasing weight rules keep increasing mean weights with the same
/// supremum at every iterate order.
fn semihypo_fixed_point(
    trial: u64,
    rng: &mut ChaCha8Rng,
    dims: (usize, usize),
) -> Result<TrialOutcome, String> {
    if trial % 2 == 0 {
        let d = draw_dim(rng, dims, 2);
        let t = gen::normal_matrix(rng, d);
        let fixed_defect = mean_fixed_point_residual(&t).map_err(err_str)?;
        let report = classify(&t, DEFAULT_CLASS_TOL).map_err(err_str)?;
        let violation = fixed_defect > DEFAULT_TOL || !report.semi_hyponormal;
        Ok(TrialOutcome {
            residual: fixed_defect,
            violation,
            witness: json!({
                "trial": trial,
                "dim": d,
                "regime": "normal-matrix",
                "fixed_point_defect": fixed_defect,
                "matrix": matrix_json(&t),
            }),
        })
    } else {
        let (rule, sup) = if trial % 4 == 1 {
            gen::increasing_list_rule(rng)
        } else {
            gen::increasing_expression_rule(rng)?
        };
        let schedule = [0usize, 1, 2, 4, 16, 64, 256, 1024];
        let ml = shift_mean_limit(&rule, &schedule, None).map_err(err_str)?;
        let sup_defect = ml
            .trace
            .iter()
            .map(|cp| (cp.sup_weight - sup).abs())
            .fold(0.0f64, f64::max);
        let mut monotone_defect = 0.0f64;
        for n in [1usize, 8] {
            let w = shift_mean_iterate_weights(&rule, n, 0..200).map_err(err_str)?;
            for pair in w.windows(2) {
                monotone_defect = monotone_defect.max(pair[0] - pair[1]);
            }
        }
        let residual = sup_defect.max(monotone_defect);
        let violation = sup_defect > 1e-6 || monotone_defect > 1e-12;
        Ok(TrialOutcome {
            residual,
            violation,
            witness: json!({
                "trial": trial,
                "regime": "increasing-weights",
                "rule": rule.describe(),
                "sup": sup,
                "sup_defect": sup_defect,
                "monotone_defect": monotone_defect,
            }),
        })
    }
}

/// Numerical-range inclusion: the sampled boundary of `W(mean(T))` lies in
/// the disk-intersection enclosure of the closure of `W(T)`.
fn numrange_inclusion(
    trial: u64,
    rng: &mut ChaCha8Rng,
    dims: (usize, usize),
) -> Result<TrialOutcome, String> {
    let d = draw_dim(rng, dims, 2);
    let t = gen::ginibre(rng, d);
    let that = mean_transform(&t).map_err(err_str)?;
    let boundary =
        crate::numrange::numerical_range_boundary(&that, 360).map_err(err_str)?;
    let grid = default_lambda_grid(&t).map_err(err_str)?;
    let oracle = DiskOracle::new(&t, &grid).map_err(err_str)?;
    let worst_margin = boundary
        .samples
        .iter()
        .map(|s| oracle.margin(s.point))
        .fold(f64::NEG_INFINITY, f64::max);

    let residual = worst_margin.max(0.0);
    Ok(TrialOutcome {
        residual,
        violation: worst_margin > 1e-7,
        witness: json!({
            "trial": trial,
            "dim": d,
            "worst_margin": worst_margin,
            "matrix": matrix_json(&t),
        }),
    })
}

/// The shifted-norm inequality `||P V - lambda|| <= ||T - lambda||` over a
/// mix of grid and random shift points.
fn support_inequality(
    trial: u64,
    rng: &mut ChaCha8Rng,
    dims: (usize, usize),
) -> Result<TrialOutcome, String> {
    let d = draw_dim(rng, dims, 2);
    let t = gen::ginibre(rng, d);
    let norm = operator_norm(&t).map_err(err_str)?;
    let grid = default_lambda_grid(&t).map_err(err_str)?;
    let mut lambdas: Vec<C64> = (0..3)
        .map(|_| grid[rng.random_range(0..grid.len())])
        .collect();
    for _ in 0..2 {
        lambdas.push(C64::from_polar(
            rng.random_range(0.0..=2.0 * norm.max(1.0)),
            rng.random_range(0.0..std::f64::consts::TAU),
        ));
    }
    let mut residual = 0.0f64;
    let mut worst_lambda = lambdas[0];
    for &lambda in &lambdas {
        let pair = support_inequality_check(&t, lambda).map_err(err_str)?;
        let gap = (pair.lhs - pair.rhs).max(0.0) / (1.0 + norm + lambda.norm());
        if gap > residual {
            residual = gap;
            worst_lambda = lambda;
        }
    }
    Ok(TrialOutcome {
        residual,
        violation: residual > DEFAULT_TOL,
        witness: json!({
            "trial": trial,
            "dim": d,
            "lambda": [worst_lambda.re, worst_lambda.im],
            "residual": residual,
            "matrix": matrix_json(&t),
        }),
    })
}

/// Numerical-radius chain `w(aluthge(T)) <= w(mean(T)) <= w(T)`.
fn w_chain(
    trial: u64,
    rng: &mut ChaCha8Rng,
    dims: (usize, usize),
) -> Result<TrialOutcome, String> {
    let d = draw_dim(rng, dims, 2);
    let t = gen::ginibre(rng, d);
    let scale = 1.0 + operator_norm(&t).map_err(err_str)?;
    let w_t = numerical_radius(&t, RADIUS_POINTS).map_err(err_str)?;
    let w_mean =
        numerical_radius(&mean_transform(&t).map_err(err_str)?, RADIUS_POINTS).map_err(err_str)?;
    let w_aluthge =
        numerical_radius(&aluthge_transform(&t, 0.5).map_err(err_str)?, RADIUS_POINTS)
            .map_err(err_str)?;

    let residual = (w_aluthge - w_mean).max(w_mean - w_t).max(0.0) / scale;
    Ok(TrialOutcome {
        residual,
        violation: residual > DEFAULT_TOL,
        witness: json!({
            "trial": trial,
            "dim": d,
            "w": w_t,
            "w_mean": w_mean,
            "w_aluthge": w_aluthge,
            "matrix": matrix_json(&t),
        }),
    })
}

/// Weighted-radius comparison in its valid one-operator regime (`B = A`),
/// including the polar instance `A = |T|`, `X = V` behind the radius chain.
fn msy(trial: u64, rng: &mut ChaCha8Rng, dims: (usize, usize)) -> Result<TrialOutcome, String> {
    let d = draw_dim(rng, dims, 2).min(6);
    let alpha = match trial % 4 {
        0 => 0.0,
        1 => 1.0,
        2 => 0.25,
        _ => rng.random_range(0.0..=1.0),
    };
    let a = gen::psd_gram(rng, d);
    let x = gen::ginibre(rng, d);
    let pair = msy_inequality_check(&a, &a, &x, alpha).map_err(err_str)?;
    let scale_ax = 1.0
        + operator_norm(&a).map_err(err_str)? * operator_norm(&x).map_err(err_str)?;
    let gap_random = (pair.lhs - pair.rhs).max(0.0) / scale_ax;

    let t = gen::ginibre(rng, d);
    let parts = canonical_polar(&t).map_err(err_str)?;
    let polar_pair =
        msy_inequality_check(&parts.modulus, &parts.modulus, &parts.isometry_part, 0.0)
            .map_err(err_str)?;
    let gap_polar =
        (polar_pair.lhs - polar_pair.rhs).max(0.0) / (1.0 + operator_norm(&t).map_err(err_str)?);

    let residual = gap_random.max(gap_polar);
    Ok(TrialOutcome {
        residual,
        violation: residual > DEFAULT_TOL,
        witness: json!({
            "trial": trial,
            "dim": d,
            "alpha": alpha,
            "gap_random": gap_random,
            "gap_polar": gap_polar,
            "a": matrix_json(&a),
            "x": matrix_json(&x),
        }),
    })
}

fn weight_rule_json(rule: &WeightSequence) -> Value {
    match rule.to_spec_string() {
        Some(spec) => json!(spec),
        None => json!(rule.describe()),
    }
}

/// Spectral radius never decreases under the mean weight map:
/// `r(W) <= r(mean-weights(W))`.
fn shift_radius_monotone(trial: u64, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, String> {
    let rule = match trial % 4 {
        0 => gen::periodic_rule(rng),
        1 => gen::list_rule(rng),
        2 => gen::oscillating_expression_rule(rng)?.0,
        _ => gen::convergent_expression_rule(rng)?.0,
    };
    let mapped = shift_mean_weights(&rule);
    let r = shift_spectral_radius(&rule, 8192, 10_000).map_err(err_str)?.value;
    let r_mapped = shift_spectral_radius(&mapped, 8192, 10_000).map_err(err_str)?.value;

    let residual = (r - r_mapped).max(0.0);
    Ok(TrialOutcome {
        residual,
        violation: r_mapped < r - 1e-7,
        witness: json!({
            "trial": trial,
            "rule": weight_rule_json(&rule),
            "radius": r,
            "radius_mean": r_mapped,
        }),
    })
}

/// The mean limit of a shift equals `log r` of the exponentiated-weight
/// shift and dominates the original spectral radius.
fn shift_mean_limit_bridge(trial: u64, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, String> {
    let (rule, exact) = if trial % 2 == 0 {
        (gen::periodic_rule(rng), true)
    } else {
        (gen::convergent_expression_rule(rng)?.0, false)
    };
    let schedule = [0usize, 1, 2, 4, 16, 64, 256, 1024];
    let mean_limit = shift_mean_limit(&rule, &schedule, None).map_err(err_str)?.value;
    let beta = exp_weights(&rule).map_err(err_str)?;
    let log_r_exp = shift_spectral_radius(&beta, 2048, 4000)
        .map_err(err_str)?
        .value
        .ln();
    let r_alpha = shift_spectral_radius(&rule, 2048, 4000).map_err(err_str)?.value;

    // Periodic rules hit closed forms on both sides; expression rules pay
    // a truncation budget in the schedule and the radius estimator.
    let (gap_tol, margin_tol) = if exact { (1e-9, 1e-9) } else { (1e-2, 1e-4) };
    let bridge_gap = (mean_limit - log_r_exp).abs();
    let order_margin = log_r_exp - r_alpha;
    let residual = bridge_gap.max((-order_margin).max(0.0));
    let violation = bridge_gap > gap_tol || order_margin < -margin_tol;
    Ok(TrialOutcome {
        residual,
        violation,
        witness: json!({
            "trial": trial,
            "rule": weight_rule_json(&rule),
            "mean_limit": mean_limit,
            "log_r_exp": log_r_exp,
            "r_alpha": r_alpha,
        }),
    })
}

/// For weights converging to `L`, the spectral radius and the mean limit
/// both converge to `L`.
fn shift_convergent(trial: u64, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, String> {
    let (rule, limit, tight) = if trial % 2 == 0 {
        let (rule, limit) = gen::convergent_expression_rule(rng)?;
        (rule, limit, false)
    } else {
        let mut rng_limit = rng.random_range(0.3..=3.0f64);
        let len = rng.random_range(2..=8usize);
        let values: Vec<f64> = (0..len).map(|_| rng.random_range(0.1..=4.0)).collect();
        if rng_limit <= 0.0 {
            rng_limit = 1.0;
        }
        let rule = WeightSequence::explicit_list(
            values,
            crate::weights::TailPolicy::DeclaredLimit(rng_limit),
            crate::weights::Laterality::Unilateral,
        )
        .map_err(err_str)?;
        (rule, rng_limit, true)
    };
    let r = shift_spectral_radius(&rule, 8192, 10_000).map_err(err_str)?.value;
    let schedule = [0usize, 1, 2, 4, 16, 64, 256, 1024, 2048];
    let mean_limit = shift_mean_limit(&rule, &schedule, None).map_err(err_str)?.value;

    let (r_tol, l_tol) = if tight { (1e-9, 1e-9) } else { (1e-3, 1e-2) };
    let r_defect = (r - limit).abs();
    let l_defect = (mean_limit - limit).abs();
    let residual = r_defect.max(l_defect);
    let violation = r_defect > r_tol || l_defect > l_tol;
    Ok(TrialOutcome {
        residual,
        violation,
        witness: json!({
            "trial": trial,
            "rule": weight_rule_json(&rule),
            "limit": limit,
            "radius": r,
            "mean_limit": mean_limit,
        }),
    })
}

/// Golden worked examples pinned to exact constants. The residual is the
/// worst tolerance-normalized deviation (1.0 = exactly at tolerance).
fn golden_examples(trial: u64) -> Result<TrialOutcome, String> {
    let mut worst = 0.0f64;
    let mut details = serde_json::Map::new();
    let record = |name: &str, deviation: f64, tol: f64, details: &mut serde_json::Map<String, Value>| {
        details.insert(name.to_string(), json!(deviation));
        deviation / tol
    };

    // 2x2 nilpotent: polar factors and the halving identity are exact.
    let t = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
    let parts = canonical_polar(&t).map_err(err_str)?;
    let dev_v = parts.isometry_part.sub(&t).max_abs_entry();
    worst = worst.max(record("nilpotent_isometry", dev_v, 1e-12, &mut details));
    let dev_p = parts.modulus.sub(&CMatrix::diag_real(&[0.0, 1.0])).max_abs_entry();
    worst = worst.max(record("nilpotent_modulus", dev_p, 1e-12, &mut details));
    let dev_mean = mean_transform(&t)
        .map_err(err_str)?
        .sub(&t.scale_re(0.5))
        .max_abs_entry();
    worst = worst.max(record("nilpotent_mean", dev_mean, 1e-12, &mut details));

    // Maximal (unitary) polar factor of the same matrix gives a different
    // transform: (U P + P U)/2 = [[0, 1/2], [1/2, 0]].
    let u_max = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
    let p = CMatrix::diag_real(&[0.0, 1.0]);
    let alt = u_max.matmul(&p).add(&p.matmul(&u_max)).scale_re(0.5);
    let dev_alt = alt
        .sub(&CMatrix::from_real_rows(&[vec![0.0, 0.5], vec![0.5, 0.0]]))
        .max_abs_entry();
    worst = worst.max(record("maximal_polar_alternative", dev_alt, 1e-12, &mut details));

    // Alternating weights (3, 1, 3, 1, …): mean weights are constant 2,
    // geometric-mean weights are sqrt(3), the radius is sqrt(3), and the
    // mean limit is 2 from the very first iterate order.
    let alternating = parse_weight_spec("periodic:3,1").map_err(err_str)?;
    let mean_rule = shift_mean_weights(&alternating);
    let aluthge_rule = shift_aluthge_weights(&alternating);
    let mut dev_weights = 0.0f64;
    for i in 0..16 {
        dev_weights = dev_weights.max((mean_rule.weight(i).map_err(err_str)? - 2.0).abs());
        dev_weights = dev_weights
            .max((aluthge_rule.weight(i).map_err(err_str)? - 3f64.sqrt()).abs());
    }
    worst = worst.max(record("alternating_mapped_weights", dev_weights, 1e-12, &mut details));
    let radius = shift_spectral_radius(&alternating, 4096, 100).map_err(err_str)?.value;
    worst = worst.max(record("alternating_radius", (radius - 3f64.sqrt()).abs(), 1e-9, &mut details));
    let schedule = [0usize, 1, 2, 4, 64, 1024];
    let ml = shift_mean_limit(&alternating, &schedule, None).map_err(err_str)?;
    let mut dev_limit = (ml.value - 2.0).abs();
    for cp in &ml.trace {
        if cp.n >= 1 {
            dev_limit = dev_limit.max((cp.sup_weight - 2.0).abs());
        }
    }
    worst = worst.max(record("alternating_mean_limit", dev_limit, 1e-12, &mut details));
    let beta = exp_weights(&alternating).map_err(err_str)?;
    let log_r_exp = shift_spectral_radius(&beta, 4096, 100)
        .map_err(err_str)?
        .value
        .ln();
    worst = worst.max(record("alternating_bridge", (log_r_exp - 2.0).abs(), 1e-9, &mut details));

    // Two-sided rule with value 1 at even indices and 1/i^2 at odd ones:
    // the rule itself dips below any epsilon, its mean weights never drop
    // below 1/2 (so the mean transform of the shift is invertible at the
    // weight level while the shift is not).
    let bilateral = parse_weight_spec("bilateral:expr:(i*i)^(((-1)^i - 1)/2)")
        .map_err(err_str)?;
    let (min_alpha, max_alpha) = bilateral.extrema(-10_000, 10_000).map_err(err_str)?;
    worst = worst.max(record("bilateral_sup", (max_alpha - 1.0).abs(), 1e-12, &mut details));
    let small_dev = (min_alpha - 1e-6).max(0.0);
    worst = worst.max(record("bilateral_small_weight", small_dev, 1e-12, &mut details));
    let mapped = shift_mean_weights(&bilateral);
    let (min_mapped, _) = mapped.extrema(-10_000, 10_000).map_err(err_str)?;
    let floor_dev = (0.5 - min_mapped).max(0.0);
    worst = worst.max(record("bilateral_mean_floor", floor_dev, 1e-12, &mut details));

    Ok(TrialOutcome {
        residual: worst,
        violation: worst > 1.0,
        witness: json!({ "trial": trial, "checks": Value::Object(details) }),
    })
}

/// Deliberately false claim (`||mean(T)|| >= ||T|| + 1`): every trial must
/// come back violated, which exercises the failure path end to end.
fn self_test(
    trial: u64,
    rng: &mut ChaCha8Rng,
    dims: (usize, usize),
) -> Result<TrialOutcome, String> {
    let d = draw_dim(rng, dims, 2);
    let t = gen::ginibre(rng, d);
    let n_t = operator_norm(&t).map_err(err_str)?;
    let n_mean = operator_norm(&mean_transform(&t).map_err(err_str)?).map_err(err_str)?;
    let residual = (n_t + 1.0 - n_mean).max(0.0) / (1.0 + n_t);
    Ok(TrialOutcome {
        residual,
        violation: n_mean < n_t + 1.0,
        witness: json!({
            "trial": trial,
            "dim": d,
            "norm": n_t,
            "norm_mean": n_mean,
            "matrix": matrix_json(&t),
        }),
    })
}
