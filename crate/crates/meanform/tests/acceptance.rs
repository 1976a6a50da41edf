//! Release gate: the pinned behaviors every build must reproduce.
//!
//! Each `criterion_*` test is one gate item, so the harness output reads as
//! a checklist — one pass/fail line per criterion. Worked examples are
//! checked against exact constants; statistical sweeps run the seeded
//! verification suites at their full trial counts and dimension ranges.
//! Criteria with a stated wall-clock budget assert it.

use std::time::Instant;

use meanform::cmatrix::{inner, rank_one, vec_norm};
use meanform::weights::{default_n_schedule, exp_weights};
use meanform::{
    binomial_iterate, canonical_polar, exp_log_bridge, mean_limit_estimate, mean_transform,
    min_singular_value, operator_norm, parse_weight_spec, rank_one_mean_iterate, run_suite,
    shift_mean_limit, shift_mean_weights, shift_spectral_radius, CMatrix, SuiteId, VerifyReport,
    C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

fn assert_suite_passes(report: &VerifyReport) {
    println!("{}", report.summary_line());
    assert!(
        report.passed,
        "suite {} failed: violations={} errors={} max_residual={:.3e} worst_case={}",
        report.suite,
        report.violations,
        report.trial_errors,
        report.max_residual,
        report.worst_case
    );
}

fn assert_within_budget(start: Instant, budget_seconds: f64, label: &str) {
    let elapsed = start.elapsed().as_secs_f64();
    println!("{label}: {elapsed:.2}s (budget {budget_seconds}s)");
    assert!(elapsed < budget_seconds, "{label} took {elapsed:.2}s, budget {budget_seconds}s");
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im).scale(std::f64::consts::FRAC_1_SQRT_2)
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| complex_gaussian(rng))
}

fn random_invertible(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    loop {
        let t = random_matrix(rng, d);
        if min_singular_value(&t).unwrap() >= 0.05 {
            return t;
        }
    }
}

fn random_scaled_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<C64> {
    let scale = rng.random_range(0.5..=2.0f64);
    loop {
        let v: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
        let norm = vec_norm(&v);
        if norm > 0.1 {
            return v.iter().map(|z| z.scale(scale / norm)).collect();
        }
    }
}

/// Nilpotent 2x2 worked example: exact polar factors, exact mean transform,
/// and the value the maximal (unitary) polar choice would produce instead —
/// pinned to show the canonical factors are the ones in use.
#[test]
fn criterion_01_nilpotent_polar_mean_and_maximal_counterexample() {
    let t = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
    let parts = canonical_polar(&t).unwrap();

    let p_expected = CMatrix::diag_real(&[0.0, 1.0]);
    assert!(parts.isometry_part.frob_dist(&t) <= 1e-12, "polar factor is T itself");
    assert!(parts.modulus.frob_dist(&p_expected) <= 1e-12, "modulus is diag(0,1)");

    let mean = mean_transform(&t).unwrap();
    let half_t = t.scale_re(0.5);
    assert!(mean.frob_dist(&half_t) <= 1e-12, "mean transform is T/2");

    // A unitary extension of the polar factor yields a different "mean":
    // (U P + P U) / 2 = [[0, 1/2], [1/2, 0]], not T/2.
    let u_max = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
    let maximal = u_max
        .matmul(&p_expected)
        .add(&p_expected.matmul(&u_max))
        .scale_re(0.5);
    let maximal_expected =
        CMatrix::from_real_rows(&[vec![0.0, 0.5], vec![0.5, 0.0]]);
    assert!(maximal.frob_dist(&maximal_expected) <= 1e-12);
    assert!(
        maximal.frob_dist(&mean) > 0.4,
        "maximal-polar value must differ from the canonical mean transform"
    );
}

/// Alternating weights 2 + (-1)^i: mean weights are constantly 2, the shift
/// spectral radius is sqrt(3), and the mean limit is 2 from the first
/// iterate on — an exact gap between mean limit and spectral radius.
#[test]
fn criterion_02_alternating_weights_constants() {
    let start = Instant::now();
    let alpha = parse_weight_spec("expr:2+(-1)^i").unwrap();

    let mean = shift_mean_weights(&alpha);
    let mean_weights = mean.weights_in(0, 5000).unwrap();
    let mean_defect = mean_weights
        .iter()
        .map(|w| (w - 2.0).abs())
        .fold(0.0f64, f64::max);
    assert!(mean_defect <= 1e-12, "mean weights constant 2, defect {mean_defect:.3e}");

    let radius = shift_spectral_radius(&alpha, 4096, 10_000).unwrap().value;
    assert!((radius - SQRT_3).abs() <= 1e-6, "radius {radius} vs sqrt(3)");

    let schedule: Vec<usize> =
        default_n_schedule().into_iter().filter(|&n| n <= 4096).collect();
    let limit = shift_mean_limit(&alpha, &schedule, None).unwrap();
    for checkpoint in &limit.trace {
        if checkpoint.n >= 1 {
            assert!(
                (checkpoint.sup_weight - 2.0).abs() <= 1e-12,
                "sup at n={} is {}, expected exactly 2",
                checkpoint.n,
                checkpoint.sup_weight
            );
        }
    }
    assert!((limit.value - 2.0).abs() <= 1e-12);
    assert!(limit.value - radius > 0.26, "mean limit 2 differs from radius sqrt(3)");
    assert_within_budget(start, 1.0, "criterion 2");
}

/// Exp/log bridge: the mean limit of a shift equals log of the spectral
/// radius of the exponentiated-weight shift and dominates the original
/// radius — exactly for the periodic (3,1) rule, and within the truncation
/// budget for weights 1 + 1/(i+1), where the n-th sup has the closed form
/// 1 + (2 - 2^-n)/(n+1).
#[test]
fn criterion_03_exp_log_bridge_constants() {
    let start = Instant::now();

    let periodic = parse_weight_spec("periodic:3,1").unwrap();
    let bridge = exp_log_bridge(&periodic).unwrap();
    assert!(bridge.bridge_gap.abs() <= 1e-6, "bridge gap {:.3e}", bridge.bridge_gap);
    assert!((bridge.r_alpha - SQRT_3).abs() <= 1e-6);
    assert!((bridge.mean_limit - 2.0).abs() <= 1e-6);
    assert!(bridge.r_alpha <= bridge.mean_limit);

    let harmonic = parse_weight_spec("expr:1+1/(i+1)").unwrap();
    let schedule: Vec<usize> =
        default_n_schedule().into_iter().filter(|&n| n <= 1024).collect();
    let limit = shift_mean_limit(&harmonic, &schedule, Some(100_000)).unwrap();
    let oracle = 1.0 + 2.0 / 1025.0;
    assert!(
        (limit.value - oracle).abs() <= 1e-6,
        "sup at n=1024 is {}, closed form {oracle}",
        limit.value
    );
    let r_alpha = shift_spectral_radius(&harmonic, 4096, 100_000).unwrap().value;
    let log_r_exp = shift_spectral_radius(&exp_weights(&harmonic).unwrap(), 4096, 100_000)
        .unwrap()
        .value
        .ln();
    for (label, value) in [
        ("mean limit", limit.value),
        ("radius", r_alpha),
        ("log radius of exp weights", log_r_exp),
    ] {
        assert!((value - 1.0).abs() <= 1e-2, "{label} = {value}, expected near 1");
    }
    assert_within_budget(start, 10.0, "criterion 3");
}

/// The binomial closed form for the n-th mean iterate matches n-fold direct
/// iteration for every n up to 10 on seeded invertible 6x6 draws.
#[test]
fn criterion_04_binomial_iterate_matches_direct_iteration() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0401);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let t = random_invertible(&mut rng, 6);
        let tol = 1e-9 * (1.0 + operator_norm(&t).unwrap());
        let mut iterated = t.clone();
        for n in 0..=10usize {
            let direct = binomial_iterate(&t, n).unwrap();
            let defect = operator_norm(&direct.sub(&iterated)).unwrap();
            worst = worst.max(defect / tol * 1e-9);
            assert!(defect <= tol, "n={n}: defect {defect:.3e} > tol {tol:.3e}");
            iterated = mean_transform(&iterated).unwrap();
        }
    }
    println!("criterion 4: worst defect {worst:.3e} (tol 1e-9 relative)");
    assert_within_budget(start, 30.0, "criterion 4");
}

/// Operator-norm and numerical-radius chains across the transforms:
/// ||aluthge|| <= ||mean|| <= ||T||, w(aluthge) <= w(mean) <= w(T), and
/// r(T) <= ||mean||, each with relative slack 1e-8.
#[test]
fn criterion_05_norm_and_radius_chains() {
    let start = Instant::now();
    assert_suite_passes(&run_suite(SuiteId::NormChain, 1000, 0x0501, (2, 8)));
    assert_suite_passes(&run_suite(SuiteId::WChain, 1000, 0x0502, (2, 8)));
    assert_within_budget(start, 120.0, "criterion 5");
}

/// Every boundary sample of the numerical range of the mean transform lies
/// in the disk-intersection enclosure of the numerical range of T.
#[test]
fn criterion_06_numerical_range_inclusion() {
    let start = Instant::now();
    assert_suite_passes(&run_suite(SuiteId::NumrangeInclusion, 300, 0x0601, (2, 6)));
    assert_within_budget(start, 180.0, "criterion 6");
}

/// The mean transform preserves numerical rank (forced deficiencies
/// included) and invertibility in both directions.
#[test]
fn criterion_07_rank_preservation_and_invertibility() {
    let start = Instant::now();
    assert_suite_passes(&run_suite(SuiteId::KernelEquality, 500, 0x0701, (2, 6)));
    assert_suite_passes(&run_suite(SuiteId::Invertibility, 500, 0x0702, (2, 6)));
    assert_within_budget(start, 60.0, "criterion 7");
}

/// Partial isometries: eigenvalue multisets of V and of its mean transform
/// match pairwise within 1e-7.
#[test]
fn criterion_08_partial_isometry_spectra() {
    let start = Instant::now();
    assert_suite_passes(&run_suite(SuiteId::PartialIsometrySpectrum, 200, 0x0801, (2, 8)));
    assert_within_budget(start, 60.0, "criterion 8");
}

/// Rank-one operators x (x) y: the closed-form n-th mean iterate matches
/// direct iteration for all n <= 12, the distance to the Aluthge transform
/// is exactly 2^-n ||x - proj_y x|| ||y||, and the iterate norms converge
/// to |<x, y>|.
#[test]
fn criterion_09_rank_one_closed_form() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0901);
    for _ in 0..200 {
        let d = rng.random_range(2..=6usize);
        let x = random_scaled_vector(&mut rng, d);
        let y = random_scaled_vector(&mut rng, d);
        let t = rank_one(&x, &y);

        let ny2: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        let coeff = inner(&x, &y) / ny2;
        let projected: Vec<C64> = y.iter().map(|z| *z * coeff).collect();
        let detached: Vec<C64> = x
            .iter()
            .zip(projected.iter())
            .map(|(xi, pi)| *xi - *pi)
            .collect();
        let delta = rank_one(&projected, &y);
        let constant = vec_norm(&detached) * vec_norm(&y);

        let mut iterated = t.clone();
        for n in 0..=12usize {
            let closed = rank_one_mean_iterate(&x, &y, n).unwrap();
            let defect = operator_norm(&closed.sub(&iterated)).unwrap();
            assert!(defect <= 1e-10, "n={n}: closed form vs iteration defect {defect:.3e}");
            let gap = operator_norm(&closed.sub(&delta)).unwrap();
            let bound = (-(n as f64)).exp2() * constant;
            assert!(gap <= bound + 1e-10, "n={n}: gap {gap:.6e} exceeds 2^-n bound {bound:.6e}");
            iterated = mean_transform(&iterated).unwrap();
        }

        let expected_limit = inner(&x, &y).norm();
        let far = operator_norm(&rank_one_mean_iterate(&x, &y, 60).unwrap()).unwrap();
        assert!((far - expected_limit).abs() <= 1e-8);
        let estimate = mean_limit_estimate(&t, 200, 1e-12).unwrap();
        assert!(
            (estimate.value - expected_limit).abs() <= 1e-8,
            "limit estimate {} vs |<x,y>| {expected_limit}",
            estimate.value
        );
    }
    assert_within_budget(start, 30.0, "criterion 9");
}

/// Weighted shifts: the mean weight map never lowers the spectral radius;
/// increasing weight rules keep their supremum at every iterate order and
/// stay increasing; and the pinned bilateral rule (1 at even indices,
/// 1/i^2 at odd) has mean weights >= 1/2 while the original weights dip
/// below 1e-6 on |i| <= 10^4.
#[test]
fn criterion_10_shift_monotonicity_and_increasing_sup() {
    let start = Instant::now();
    assert_suite_passes(&run_suite(SuiteId::ShiftRadiusMonotone, 100, 0x1001, (2, 6)));
    // Odd trials draw increasing rules: 100 trials = 50 increasing draws.
    assert_suite_passes(&run_suite(SuiteId::SemihypoFixedPoint, 100, 0x1002, (2, 6)));

    let bilateral =
        parse_weight_spec("bilateral:expr:(i*i)^(((-1)^i - 1)/2)").unwrap();
    let (min_alpha, max_alpha) = bilateral.extrema(-10_000, 10_000).unwrap();
    assert!(min_alpha <= 1e-6, "min weight {min_alpha:.3e}");
    assert!((max_alpha - 1.0).abs() <= 1e-12);
    let mean = shift_mean_weights(&bilateral);
    let (min_mean, _) = mean.extrema(-10_000, 10_000).unwrap();
    assert!(min_mean >= 0.5 - 1e-12, "min mean weight {min_mean} must stay >= 1/2");
    assert_within_budget(start, 60.0, "criterion 10");
}

/// Documentation-only criterion. Two behaviors of the underlying operators
/// exist only in infinite dimension and are NOT reproduced here: strong
/// convergence of the mean iterates to a normal operator (finite matrices
/// that are semi-hyponormal are already normal, so the interesting
/// non-normal starting points have no finite witness), and shift spectra
/// filling a disk (every finite truncation of a shift is nilpotent with
/// spectrum {0}). Their finite shadows are what this gate checks instead:
/// spectrum preservation for partial isometries, the rank-one norm limit,
/// and the weight calculus where shift quantities have closed forms. This
/// test pins the shadow suites so the note cannot silently rot.
#[test]
fn criterion_11_infinite_dimensional_shadows_documented() {
    for id in [
        "partial-isometry-spectrum",
        "rank-one",
        "semihypo-fixed-point",
        "shift-radius-monotone",
        "shift-mean-limit-bridge",
        "shift-convergent",
    ] {
        assert!(
            SuiteId::parse(id).is_ok(),
            "documented shadow suite {id} must exist"
        );
    }
}
