//! End-to-end checks of the verification runner: every suite passes a
//! modest randomized run, the deliberately broken suite fails every trial,
//! and reports are reproducible for a fixed seed.

use meanform::{run_suite, SuiteId};

/// Trial counts tuned to each suite's per-trial cost so the whole file
/// stays in the seconds range.
fn smoke_trials(suite: SuiteId) -> u64 {
    match suite {
        SuiteId::GoldenExamples => 1,
        SuiteId::ShiftRadiusMonotone
        | SuiteId::ShiftMeanLimitBridge
        | SuiteId::ShiftConvergent => 4,
        SuiteId::NumrangeInclusion | SuiteId::WChain | SuiteId::Msy => 6,
        _ => 10,
    }
}

#[test]
fn every_claim_suite_passes_a_smoke_run() {
    for suite in SuiteId::ALL {
        if suite == SuiteId::SelfTest {
            continue;
        }
        let report = run_suite(suite, smoke_trials(suite), 42, (2, 6));
        assert!(
            report.passed,
            "{}: violations={} errors={:?} max_residual={:e} worst={}",
            report.suite,
            report.violations,
            report.error_sample,
            report.max_residual,
            report.worst_case,
        );
        assert_eq!(report.trial_errors, 0, "{}", report.suite);
    }
}

#[test]
fn broken_claim_suite_fails_every_trial() {
    let report = run_suite(SuiteId::SelfTest, 8, 42, (2, 6));
    assert!(!report.passed);
    assert_eq!(report.violations, 8);
}

#[test]
fn reports_for_a_fixed_seed_are_reproducible() {
    let a = run_suite(SuiteId::RankOne, 12, 7, (2, 5));
    let b = run_suite(SuiteId::RankOne, 12, 7, (2, 5));
    assert_eq!(a.max_residual.to_bits(), b.max_residual.to_bits());
    assert_eq!(
        serde_json::to_string(&a.worst_case).unwrap(),
        serde_json::to_string(&b.worst_case).unwrap()
    );
}

#[test]
fn worst_case_table_is_sorted_and_bounded() {
    let report = run_suite(SuiteId::NormChain, 25, 3, (2, 5));
    assert!(report.worst.len() <= 10);
    for pair in report.worst.windows(2) {
        assert!(pair[0].residual >= pair[1].residual);
    }
}
