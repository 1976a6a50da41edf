//! Randomized verification suites: each suite stress-tests one identity,
//! inequality, or convergence claim about the mean transform (of matrices
//! or of weighted shifts) over seeded random ensembles and reports the
//! worst residuals together with reproducible witnesses.
//!
//! Determinism contract: a report depends only on `(suite, trials, seed,
//! dims)`. Trials get independent ChaCha8 streams keyed by `(seed, trial)`
//! and run in parallel, but results are folded in trial order, so reports
//! are bit-identical across thread counts.

mod generators;
mod suites;

use serde::Serialize;
use serde_json::{json, Value};
use std::time::Instant;
use thiserror::Error;

/// Number of worst trials retained in a report.
const WORST_TABLE_LEN: usize = 10;

/// Errors from the suite runner.
#[derive(Debug, Error)]
pub enum VerifyError {
    /// The requested suite id is not in the registry.
    #[error("unknown verification suite: {name}")]
    UnknownSuite { name: String },
}

/// Identifier of one verification suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuiteId {
    /// Kernel of the transform equals the kernel of the operator.
    KernelEquality,
    /// Invertibility passes to the transform and ranks are preserved.
    Invertibility,
    /// Equivariance under unitary conjugation and entrywise conjugation.
    Equivariance,
    /// Operator-norm chain between Aluthge, mean, and the operator.
    NormChain,
    /// Positive-operator norm inequality behind the norm chain.
    Heinz,
    /// Closed form and spectrum preservation for partial isometries.
    PartialIsometrySpectrum,
    /// Closed-form iterates and limits for rank-one operators.
    RankOne,
    /// Equivalent formulations of the kernel-inclusion condition.
    LemmaEquivalences,
    /// Binomial expansion of iterated transforms.
    BinomialFormula,
    /// Operator and adjoint share every iterate norm when both inject.
    SameMeanLimit,
    /// Fixed points among normal matrices and increasing shift weights.
    SemihypoFixedPoint,
    /// Numerical range of the transform sits inside the original closure.
    NumrangeInclusion,
    /// Shifted-norm inequality for the support line of the transform.
    SupportInequality,
    /// Numerical-radius chain between Aluthge, mean, and the operator.
    WChain,
    /// Weighted numerical-radius comparison in its one-operator regime.
    Msy,
    /// Spectral radius never decreases under the shift mean map.
    ShiftRadiusMonotone,
    /// Mean limit of a shift equals log of the exponentiated-shift radius.
    ShiftMeanLimitBridge,
    /// Convergent weights force radius and mean limit to the same value.
    ShiftConvergent,
    /// Golden worked examples pinned to exact constants.
    GoldenExamples,
    /// Deliberately false claim; every trial must report a violation.
    SelfTest,
}

impl SuiteId {
    /// Every suite in registry order.
    pub const ALL: [SuiteId; 20] = [
        SuiteId::KernelEquality,
        SuiteId::Invertibility,
        SuiteId::Equivariance,
        SuiteId::NormChain,
        SuiteId::Heinz,
        SuiteId::PartialIsometrySpectrum,
        SuiteId::RankOne,
        SuiteId::LemmaEquivalences,
        SuiteId::BinomialFormula,
        SuiteId::SameMeanLimit,
        SuiteId::SemihypoFixedPoint,
        SuiteId::NumrangeInclusion,
        SuiteId::SupportInequality,
        SuiteId::WChain,
        SuiteId::Msy,
        SuiteId::ShiftRadiusMonotone,
        SuiteId::ShiftMeanLimitBridge,
        SuiteId::ShiftConvergent,
        SuiteId::GoldenExamples,
        SuiteId::SelfTest,
    ];

    /// Stable command-line identifier of the suite.
    pub fn as_str(self) -> &'static str {
        match self {
            SuiteId::KernelEquality => "kernel-equality",
            SuiteId::Invertibility => "invertibility",
            SuiteId::Equivariance => "equivariance",
            SuiteId::NormChain => "norm-chain",
            SuiteId::Heinz => "heinz",
            SuiteId::PartialIsometrySpectrum => "partial-isometry-spectrum",
            SuiteId::RankOne => "rank-one",
            SuiteId::LemmaEquivalences => "lemma-equivalences",
            SuiteId::BinomialFormula => "binomial-formula",
            SuiteId::SameMeanLimit => "same-mean-limit",
            SuiteId::SemihypoFixedPoint => "semihypo-fixed-point",
            SuiteId::NumrangeInclusion => "numrange-inclusion",
            SuiteId::SupportInequality => "support-inequality",
            SuiteId::WChain => "w-chain",
            SuiteId::Msy => "msy",
            SuiteId::ShiftRadiusMonotone => "shift-radius-monotone",
            SuiteId::ShiftMeanLimitBridge => "shift-mean-limit-bridge",
            SuiteId::ShiftConvergent => "shift-convergent",
            SuiteId::GoldenExamples => "paper-examples",
            SuiteId::SelfTest => "self-test",
        }
    }

    /// Parses a command-line identifier.
    pub fn parse(name: &str) -> Result<SuiteId, VerifyError> {
        SuiteId::ALL
            .iter()
            .copied()
            .find(|s| s.as_str() == name)
            .ok_or_else(|| VerifyError::UnknownSuite {
                name: name.to_string(),
            })
    }

    /// One-line description of what the suite checks.
    pub fn describe(self) -> &'static str {
        match self {
            SuiteId::KernelEquality => {
                "kernel of the mean transform equals the kernel of the operator"
            }
            SuiteId::Invertibility => {
                "invertibility transfers to the mean transform; ranks are preserved"
            }
            SuiteId::Equivariance => {
                "mean transform commutes with unitary and entrywise conjugation"
            }
            SuiteId::NormChain => {
                "operator-norm chain: Aluthge <= mean <= operator, radius <= mean"
            }
            SuiteId::Heinz => "positive-operator inequality |A^½ X B^½| <= |(AX+XB)/2|",
            SuiteId::PartialIsometrySpectrum => {
                "partial isometries: closed-form mean and spectrum preservation"
            }
            SuiteId::RankOne => "rank-one operators: closed-form iterates and mean limit",
            SuiteId::LemmaEquivalences => {
                "equivalent formulations of the cokernel-inclusion condition"
            }
            SuiteId::BinomialFormula => "binomial expansion of iterated mean transforms",
            SuiteId::SameMeanLimit => {
                "operator and adjoint share iterate norms when both inject"
            }
            SuiteId::SemihypoFixedPoint => {
                "normal matrices are fixed points; increasing weights keep their sup"
            }
            SuiteId::NumrangeInclusion => {
                "numerical range of the mean sits inside the original closure"
            }
            SuiteId::SupportInequality => "shifted-norm inequality |PV-z| <= |T-z|",
            SuiteId::WChain => {
                "numerical-radius chain: Aluthge <= mean <= operator"
            }
            SuiteId::Msy => {
                "weighted radius comparison w(A^½XA^½) <= w((A^aXA^(1-a)+A^(1-a)XA^a)/2)"
            }
            SuiteId::ShiftRadiusMonotone => {
                "shift spectral radius never decreases under the mean weight map"
            }
            SuiteId::ShiftMeanLimitBridge => {
                "shift mean limit equals log-radius of the exponentiated shift"
            }
            SuiteId::ShiftConvergent => {
                "convergent weights force radius and mean limit to the weight limit"
            }
            SuiteId::GoldenExamples => "golden worked examples pinned to exact constants",
            SuiteId::SelfTest => "deliberately false claim; every trial must violate",
        }
    }
}

/// Result of one trial: residual magnitude, violation verdict, witness.
pub(crate) struct TrialOutcome {
    pub residual: f64,
    pub violation: bool,
    pub witness: Value,
}

/// Trial index and residual, for the worst-cases table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrialResidual {
    pub trial: u64,
    pub residual: f64,
}

/// Outcome of running one suite.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    /// Command-line identifier of the suite.
    pub suite: String,
    /// Number of trials requested.
    pub trials: u64,
    /// Base seed for the per-trial random streams.
    pub seed: u64,
    /// Inclusive dimension range instances were drawn from.
    pub dims: (usize, usize),
    /// Number of trials whose claim check failed.
    pub violations: u64,
    /// Number of trials that errored before reaching the claim check.
    pub trial_errors: u64,
    /// Largest residual over all completed trials.
    pub max_residual: f64,
    /// Witness of the worst-residual trial.
    pub worst_case: Value,
    /// Worst trials by residual, descending.
    pub worst: Vec<TrialResidual>,
    /// Representative message from the first errored trial, if any.
    pub error_sample: Option<String>,
    /// Wall-clock duration of the run.
    pub elapsed_seconds: f64,
    /// True when no violations occurred and not every trial errored.
    pub passed: bool,
}

impl VerifyReport {
    /// One-line human-readable summary.
    pub fn summary_line(&self) -> String {
        format!(
            "{} {}: trials={} violations={} errors={} max_residual={:.3e} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.trials,
            self.violations,
            self.trial_errors,
            self.max_residual,
            self.elapsed_seconds,
        )
    }
}

/// Runs `trials` independent trials of one suite over instances with
/// dimensions drawn from the inclusive range `dims`.
pub fn run_suite(suite: SuiteId, trials: u64, seed: u64, dims: (usize, usize)) -> VerifyReport {
    use rayon::prelude::*;

    let start = Instant::now();
    let outcomes: Vec<Result<TrialOutcome, String>> = (0..trials)
        .into_par_iter()
        .map(|trial| suites::run_trial(suite, trial, seed, dims))
        .collect();

    let mut violations = 0u64;
    let mut trial_errors = 0u64;
    let mut error_sample = None;
    let mut max_residual = 0.0f64;
    let mut worst_case = Value::Null;
    let mut worst: Vec<TrialResidual> = Vec::new();
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(o) => {
                if o.violation {
                    violations += 1;
                }
                if o.residual >= max_residual || worst_case.is_null() {
                    max_residual = max_residual.max(o.residual);
                    worst_case = o.witness;
                }
                worst.push(TrialResidual {
                    trial: trial as u64,
                    residual: o.residual,
                });
            }
            Err(msg) => {
                trial_errors += 1;
                if error_sample.is_none() {
                    error_sample = Some(format!("trial {trial}: {msg}"));
                }
            }
        }
    }
    worst.sort_by(|a, b| b.residual.total_cmp(&a.residual).then(a.trial.cmp(&b.trial)));
    worst.truncate(WORST_TABLE_LEN);

    let passed = violations == 0 && (trials == 0 || trial_errors < trials);
    VerifyReport {
        suite: suite.as_str().to_string(),
        trials,
        seed,
        dims,
        violations,
        trial_errors,
        max_residual,
        worst_case: if worst_case.is_null() {
            json!({"note": "no completed trials"})
        } else {
            worst_case
        },
        worst,
        error_sample,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        passed,
    }
}

/// Runs every suite in the registry with shared settings.
pub fn run_all(trials: u64, seed: u64, dims: (usize, usize)) -> Vec<VerifyReport> {
    SuiteId::ALL
        .iter()
        .map(|&suite| run_suite(suite, trials, seed, dims))
        .collect()
}
