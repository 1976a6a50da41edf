//! Seeded random ensembles for the verification suites.
//!
//! Every generator draws from a caller-supplied ChaCha stream, so a trial
//! is fully determined by `(seed, trial index)` regardless of how trials
//! are scheduled across threads.

use crate::cmatrix::{inner, vec_norm, CMatrix};
use crate::eig::min_singular_value;
use crate::weights::{Laterality, TailPolicy, WeightSequence};
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Smallest singular value enforced by [`invertible`].
pub const SIGMA_MIN_FLOOR: f64 = 0.05;
/// Redraw budget for rejection-sampled ensembles.
pub const RESAMPLE_CAP: usize = 100;

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial RNG keyed by `(seed, trial)`: the 256-bit ChaCha key is a
/// splitmix expansion of both, so streams for different trials are
/// independent and reproducible on any thread count.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut state = seed;
    let mixed = splitmix(&mut state) ^ trial.wrapping_mul(0xD1B5_4A32_D192_ED03);
    let mut expander = mixed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix(&mut expander).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Standard complex Gaussian: real and imaginary parts N(0, 1/2).
pub fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im).scale(std::f64::consts::FRAC_1_SQRT_2)
}

/// Dense matrix with independent complex Gaussian entries.
pub fn ginibre(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, complex_gaussian(rng));
        }
    }
    m
}

/// Random unit vector (Gaussian direction, rejection below norm 0.1).
pub fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        let norm = vec_norm(&v);
        if norm > 0.1 {
            return v.iter().map(|z| *z / norm).collect();
        }
    }
}

/// Unitary from Gram-Schmidt on Gaussian columns, with the usual phase
/// correction so the distribution is rotation invariant.
/// Guarantee: `||U*U - I|| <= 1e-12`.
pub fn haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        let raw = v.clone();
        // Two orthogonalization passes keep the loss of orthogonality at
        // the rounding level even for nearly dependent draws.
        for _ in 0..2 {
            for q in &cols {
                let coeff = inner(&v, q);
                for (vi, qi) in v.iter_mut().zip(q.iter()) {
                    *vi -= coeff * qi;
                }
            }
        }
        let norm = vec_norm(&v);
        if norm < 1e-8 {
            continue; // dependent draw; probability ~0, redraw
        }
        let diag = inner(&raw, &v) / norm;
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { C64::new(1.0, 0.0) };
        cols.push(v.iter().map(|z| *z / norm * phase).collect());
    }
    CMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Partial isometry of the given rank: `U D W*` with `D` a 0/1 diagonal.
pub fn partial_isometry(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> CMatrix {
    let u = haar_unitary(rng, n);
    let w = haar_unitary(rng, n);
    let d = CMatrix::diag_real(
        &(0..n).map(|k| if k < rank { 1.0 } else { 0.0 }).collect::<Vec<_>>(),
    );
    u.matmul(&d).matmul(&w.adjoint())
}

/// Positive semidefinite Gram matrix `G* G` of a Gaussian `G`.
pub fn psd_gram(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let g = ginibre(rng, n);
    g.adjoint().matmul(&g)
}

/// Invertible matrix with `sigma_min >= 0.05`, by rejection sampling.
pub fn invertible(rng: &mut ChaCha8Rng, n: usize) -> Result<CMatrix, String> {
    for _ in 0..RESAMPLE_CAP {
        let t = ginibre(rng, n);
        let smin = min_singular_value(&t).map_err(|e| e.to_string())?;
        if smin >= SIGMA_MIN_FLOOR {
            return Ok(t);
        }
    }
    Err(format!("no draw reached sigma_min >= {SIGMA_MIN_FLOOR} in {RESAMPLE_CAP} tries"))
}

/// Rank-`rank` matrix `U diag(s, 0) W*` with nonzero singular values in
/// `[0.3, 3]` (well separated from the rank tolerance).
pub fn rank_deficient(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> CMatrix {
    let u = haar_unitary(rng, n);
    let w = haar_unitary(rng, n);
    let singulars: Vec<f64> = (0..n)
        .map(|k| if k < rank { rng.random_range(0.3..=3.0) } else { 0.0 })
        .collect();
    u.matmul(&CMatrix::diag_real(&singulars)).matmul(&w.adjoint())
}

/// Normal matrix `U diag(z) U*` with eigenvalues in the disk of radius 2.
pub fn normal_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let u = haar_unitary(rng, n);
    let eigs: Vec<C64> = (0..n)
        .map(|_| {
            let r = rng.random_range(0.0..=2.0f64).sqrt() * std::f64::consts::SQRT_2;
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            C64::from_polar(r, theta)
        })
        .collect();
    u.matmul(&CMatrix::diag(&eigs)).matmul(&u.adjoint())
}

/// Periodic weight rule: period 1..=8, values in `[0.1, 4]`.
pub fn periodic_rule(rng: &mut ChaCha8Rng) -> WeightSequence {
    let len = rng.random_range(1..=8usize);
    let values: Vec<f64> = (0..len).map(|_| rng.random_range(0.1..=4.0)).collect();
    WeightSequence::periodic(values, Laterality::Unilateral).expect("values are positive")
}

/// Finite list rule: length 2..=12, values in `[0.1, 4]`, random tail.
pub fn list_rule(rng: &mut ChaCha8Rng) -> WeightSequence {
    let len = rng.random_range(2..=12usize);
    let values: Vec<f64> = (0..len).map(|_| rng.random_range(0.1..=4.0)).collect();
    let tail = if rng.random_bool(0.5) {
        TailPolicy::RepeatLast
    } else {
        TailPolicy::DeclaredLimit(rng.random_range(0.1..=4.0))
    };
    WeightSequence::explicit_list(values, tail, Laterality::Unilateral).expect("values positive")
}

/// Expression rule decaying to a known limit: `L + c/(i+1)`.
/// Returns the rule and its limit `L`.
pub fn convergent_expression_rule(rng: &mut ChaCha8Rng) -> Result<(WeightSequence, f64), String> {
    let limit = rng.random_range(0.5..=2.5f64);
    let c = rng.random_range(0.1..=2.0f64);
    let source = format!("{limit}+{c}/(i+1)");
    let seq = WeightSequence::expression(&source, Laterality::Unilateral)
        .map_err(|e| e.to_string())?;
    Ok((seq.with_declared_sup(limit + c), limit))
}

/// Increasing expression rule with exponentially fast convergence:
/// `L - c*exp(-i/s)`, `s <= 50` so the tail is exact at desk truncations.
/// Returns the rule and its supremum `L`.
pub fn increasing_expression_rule(rng: &mut ChaCha8Rng) -> Result<(WeightSequence, f64), String> {
    let sup = rng.random_range(1.0..=3.0f64);
    let c = rng.random_range(0.2..=(sup - 0.2));
    let s = rng.random_range(10.0..=50.0f64);
    let source = format!("{sup}-{c}*exp(-i/{s})");
    let seq = WeightSequence::expression(&source, Laterality::Unilateral)
        .map_err(|e| e.to_string())?;
    Ok((seq.with_declared_sup(sup), sup))
}

/// Increasing list rule (ascending values, repeated tail).
/// Returns the rule and its supremum.
pub fn increasing_list_rule(rng: &mut ChaCha8Rng) -> (WeightSequence, f64) {
    let len = rng.random_range(2..=10usize);
    let mut values: Vec<f64> = (0..len).map(|_| rng.random_range(0.1..=4.0)).collect();
    values.sort_by(f64::total_cmp);
    let sup = *values.last().expect("nonempty");
    let seq =
        WeightSequence::explicit_list(values, TailPolicy::RepeatLast, Laterality::Unilateral)
            .expect("values positive");
    (seq, sup)
}

/// Bounded oscillating expression rule `a+b*(-1)^i` (period-two values
/// `a+b`, `a-b`). Returns the rule and the pair `(a, b)`.
pub fn oscillating_expression_rule(
    rng: &mut ChaCha8Rng,
) -> Result<(WeightSequence, (f64, f64)), String> {
    let a = rng.random_range(1.0..=3.0f64);
    let b = rng.random_range(0.1..=(a - 0.1));
    let source = format!("{a}+{b}*(-1)^i");
    let seq = WeightSequence::expression(&source, Laterality::Unilateral)
        .map_err(|e| e.to_string())?;
    Ok((seq.with_declared_sup(a + b), (a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{is_partial_isometry, DEFAULT_CLASS_TOL};
    use crate::eig::operator_norm;
    use crate::polar::canonical_polar;

    #[test]
    fn trial_rng_is_reproducible_and_trial_dependent() {
        let a: Vec<u64> = {
            let mut rng = trial_rng(7, 3);
            (0..4).map(|_| rng.random::<u64>()).collect()
        };
        let b: Vec<u64> = {
            let mut rng = trial_rng(7, 3);
            (0..4).map(|_| rng.random::<u64>()).collect()
        };
        let c: Vec<u64> = {
            let mut rng = trial_rng(7, 4);
            (0..4).map(|_| rng.random::<u64>()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn unitary_draws_are_unitary_to_twelve_digits() {
        let mut rng = trial_rng(11, 0);
        for n in [2usize, 5, 8] {
            let u = haar_unitary(&mut rng, n);
            let residual = u
                .adjoint()
                .matmul(&u)
                .sub(&CMatrix::identity(n))
                .frob_norm();
            assert!(residual <= 1e-12, "n={n} residual={residual}");
        }
    }

    #[test]
    fn partial_isometry_draws_satisfy_the_predicate() {
        let mut rng = trial_rng(13, 0);
        for (n, rank) in [(3usize, 1usize), (4, 2), (6, 6)] {
            let v = partial_isometry(&mut rng, n, rank);
            assert!(is_partial_isometry(&v, DEFAULT_CLASS_TOL).unwrap());
            let parts = canonical_polar(&v).unwrap();
            assert_eq!(parts.numerical_rank, rank);
        }
    }

    #[test]
    fn invertible_draws_respect_the_sigma_floor() {
        let mut rng = trial_rng(17, 0);
        for _ in 0..5 {
            let t = invertible(&mut rng, 5).unwrap();
            assert!(min_singular_value(&t).unwrap() >= SIGMA_MIN_FLOOR);
        }
    }

    #[test]
    fn rank_deficient_draws_have_the_requested_rank() {
        let mut rng = trial_rng(19, 0);
        let t = rank_deficient(&mut rng, 6, 2);
        assert_eq!(canonical_polar(&t).unwrap().numerical_rank, 2);
        assert!(operator_norm(&t).unwrap() <= 3.0 + 1e-9);
    }

    #[test]
    fn normal_draws_commute_with_their_adjoints() {
        let mut rng = trial_rng(23, 0);
        let t = normal_matrix(&mut rng, 5);
        let comm = t.matmul(&t.adjoint()).sub(&t.adjoint().matmul(&t));
        assert!(comm.frob_norm() <= 1e-10);
    }

    #[test]
    fn expression_rule_generators_build_valid_rules() {
        let mut rng = trial_rng(29, 0);
        let (conv, limit) = convergent_expression_rule(&mut rng).unwrap();
        assert!(conv.weight(10_000).unwrap() > limit);
        let (inc, sup) = increasing_expression_rule(&mut rng).unwrap();
        assert!(inc.weight(0).unwrap() < inc.weight(1).unwrap());
        assert!(inc.weight(100_000).unwrap() <= sup);
        let (osc, (a, b)) = oscillating_expression_rule(&mut rng).unwrap();
        assert!((osc.weight(0).unwrap() - (a + b)).abs() <= 1e-12);
        assert!((osc.weight(1).unwrap() - (a - b)).abs() <= 1e-12);
    }
}
