//! Weight-sequence calculus for weighted shift operators.
//!
//! A weighted shift maps basis vector `e_i` to `alpha_i e_{i+1}` for a
//! bounded sequence of strictly positive weights. Its transforms stay
//! weighted shifts, so everything reduces to maps on the weight sequence:
//!
//! * mean transform:       `alpha_i -> (alpha_i + alpha_{i+1}) / 2`
//! * Aluthge transform:    `alpha_i -> sqrt(alpha_i * alpha_{i+1})`
//! * n-th mean iterate:    binomial average of `n + 1` consecutive weights
//!
//! plus the spectral radius (limit of sup window geometric means), the mean
//! limit (limit of sup binomial-averaged weights), and the bridge relating
//! the mean limit of `alpha` to the spectral radius of `exp(alpha)`.
//!
//! Rules are periodic lists, finite lists with a tail policy, or positive
//! expressions in the index; bilateral (two-sided) rules support the weight
//! maps and min/max diagnostics, while the radius and limit formulas are
//! one-sided only.

use crate::binom::mean_pmf_window;
use crate::cmatrix::CMatrix;
use crate::expr::{parse_weight_expr, CompiledExpr, EvalError, Expr, ParseError};
use rayon::prelude::*;
use serde::Serialize;
use std::ops::Range;
use thiserror::Error;

/// Default window cap for the spectral-radius estimator.
pub const DEFAULT_RADIUS_N_MAX: usize = 4096;
/// Default index cap for sup truncation in the radius estimator.
pub const DEFAULT_RADIUS_I_MAX: usize = 10_000;
/// Expression rules are validated for positivity on `[0, 10^6]`
/// (and the mirrored negative range when bilateral) at construction.
pub const EXPR_VALIDATION_SPAN: i64 = 1_000_000;
/// Largest iterate order in the default mean-limit schedule.
pub const DEFAULT_SCHEDULE_MAX_N: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("weight rule failed at index {index}: {source}")]
    Eval { index: i64, source: EvalError },
    #[error("weight at index {index} is {value}; weights must be strictly positive and finite")]
    NonPositiveWeight { index: i64, value: f64 },
    #[error("weight list must not be empty")]
    EmptyWeightList,
    #[error("index {index} is negative but the sequence is unilateral")]
    NegativeIndex { index: i64 },
    #[error("this operation is defined for unilateral sequences only")]
    NotUnilateral,
    #[error("weight rule appears unbounded: sup still growing at probe index {probe}")]
    Unbounded { probe: i64 },
    #[error("truncated shift needs dimension >= 2, got {dim}")]
    DimensionTooSmall { dim: usize },
    #[error("unknown weight spec form {found:?}; expected list:, periodic:, or expr: (optionally prefixed bilateral:)")]
    UnknownSpecForm { found: String },
    #[error("bad weight spec field: {detail}")]
    BadSpecField { detail: String },
}

/// One-sided (indices 0, 1, 2, …) or two-sided (all integers).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Laterality {
    Unilateral,
    Bilateral,
}

/// Evaluation of a finite list beyond its last element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TailPolicy {
    /// Repeat the final listed value forever.
    RepeatLast,
    /// The sequence converges; indices past the list take the limit value.
    DeclaredLimit(f64),
}

/// Structural weight-sequence maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WeightMap {
    /// `(alpha_i + alpha_{i+1}) / 2` — the mean-transform weight map.
    PairMean,
    /// `sqrt(alpha_i * alpha_{i+1})` — the Aluthge-transform weight map.
    PairGeometric,
    /// `exp(alpha_i)` — the exp/log bridge substitution.
    PointwiseExp,
}

/// Rule kinds. `Derived` wraps a map whose closed form is not a base kind
/// (expression rules, or pair maps over two-sided lists).
#[derive(Debug, Clone)]
pub enum WeightKind {
    ExplicitList { values: Vec<f64>, tail: TailPolicy },
    Periodic { values: Vec<f64> },
    Expression { source: String, ast: Expr, compiled: CompiledExpr },
    Derived { base: Box<WeightSequence>, map: WeightMap },
}

/// A validated weight rule: every evaluated weight is strictly positive
/// and finite.
#[derive(Debug, Clone)]
pub struct WeightSequence {
    pub kind: WeightKind,
    pub laterality: Laterality,
    /// Upper bound for the weights; exact sup for list and periodic rules,
    /// caller-declared (or absent) for expression rules.
    pub declared_sup: Option<f64>,
}

fn check_positive(index: i64, value: f64) -> Result<f64, WeightError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(WeightError::NonPositiveWeight { index, value })
    }
}

impl WeightSequence {
    /// Finite list with a tail policy; `declared_sup` is set to the exact sup.
    pub fn explicit_list(
        values: Vec<f64>,
        tail: TailPolicy,
        laterality: Laterality,
    ) -> Result<Self, WeightError> {
        if values.is_empty() {
            return Err(WeightError::EmptyWeightList);
        }
        for (i, &v) in values.iter().enumerate() {
            check_positive(i as i64, v)?;
        }
        let mut sup = values.iter().copied().fold(0.0f64, f64::max);
        if let TailPolicy::DeclaredLimit(limit) = tail {
            check_positive(values.len() as i64, limit)?;
            sup = sup.max(limit);
        }
        Ok(WeightSequence {
            kind: WeightKind::ExplicitList { values, tail },
            laterality,
            declared_sup: Some(sup),
        })
    }

    /// Cyclic rule `alpha_i = values[i mod p]`; exact sup recorded.
    pub fn periodic(values: Vec<f64>, laterality: Laterality) -> Result<Self, WeightError> {
        if values.is_empty() {
            return Err(WeightError::EmptyWeightList);
        }
        for (i, &v) in values.iter().enumerate() {
            check_positive(i as i64, v)?;
        }
        let sup = values.iter().copied().fold(0.0f64, f64::max);
        Ok(WeightSequence {
            kind: WeightKind::Periodic { values },
            laterality,
            declared_sup: Some(sup),
        })
    }

    /// Expression rule; parsing and a positivity scan over the validation
    /// span happen here, so evaluation failures surface at construction.
    pub fn expression(source: &str, laterality: Laterality) -> Result<Self, WeightError> {
        let ast = parse_weight_expr(source)?;
        let compiled = ast.compile();
        let lo = match laterality {
            Laterality::Unilateral => 0,
            Laterality::Bilateral => -EXPR_VALIDATION_SPAN,
        };
        let first_bad = (lo..=EXPR_VALIDATION_SPAN)
            .into_par_iter()
            .filter_map(|i| match compiled.eval(i as f64) {
                Err(source) => Some((i, WeightError::Eval { index: i, source })),
                Ok(v) if !(v > 0.0 && v.is_finite()) => {
                    Some((i, WeightError::NonPositiveWeight { index: i, value: v }))
                }
                Ok(_) => None,
            })
            .min_by_key(|(i, _)| *i);
        if let Some((_, err)) = first_bad {
            return Err(err);
        }
        Ok(WeightSequence {
            kind: WeightKind::Expression { source: source.to_string(), ast, compiled },
            laterality,
            declared_sup: None,
        })
    }

    /// Attaches an upper bound for the weights (used by the exp/log bridge
    /// to skip the boundedness probe).
    pub fn with_declared_sup(mut self, sup: f64) -> Self {
        self.declared_sup = Some(sup);
        self
    }

    /// Evaluates the rule at index `i`. Unilateral rules reject negative
    /// indices; bilateral lists extend to the left with their first value.
    pub fn weight(&self, i: i64) -> Result<f64, WeightError> {
        if self.laterality == Laterality::Unilateral && i < 0 {
            return Err(WeightError::NegativeIndex { index: i });
        }
        match &self.kind {
            WeightKind::ExplicitList { values, tail } => {
                if i < 0 {
                    Ok(values[0])
                } else if (i as usize) < values.len() {
                    Ok(values[i as usize])
                } else {
                    Ok(match tail {
                        TailPolicy::RepeatLast => *values.last().expect("list is nonempty"),
                        TailPolicy::DeclaredLimit(limit) => *limit,
                    })
                }
            }
            WeightKind::Periodic { values } => {
                let p = values.len() as i64;
                Ok(values[i.rem_euclid(p) as usize])
            }
            WeightKind::Expression { compiled, .. } => {
                let v = compiled
                    .eval(i as f64)
                    .map_err(|source| WeightError::Eval { index: i, source })?;
                check_positive(i, v)
            }
            WeightKind::Derived { base, map } => match map {
                WeightMap::PairMean => Ok(0.5 * (base.weight(i)? + base.weight(i + 1)?)),
                WeightMap::PairGeometric => {
                    Ok((base.weight(i)? * base.weight(i + 1)?).sqrt())
                }
                WeightMap::PointwiseExp => {
                    let v = base.weight(i)?.exp();
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(WeightError::Eval { index: i, source: EvalError::NonFinite })
                    }
                }
            },
        }
    }

    /// Evaluates the rule on an inclusive index range.
    pub fn weights_in(&self, lo: i64, hi: i64) -> Result<Vec<f64>, WeightError> {
        (lo..=hi).map(|i| self.weight(i)).collect()
    }

    /// Minimum and maximum weight over an inclusive index range.
    pub fn extrema(&self, lo: i64, hi: i64) -> Result<(f64, f64), WeightError> {
        let vals = self.weights_in(lo, hi)?;
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let max = vals.iter().copied().fold(0.0f64, f64::max);
        Ok((min, max))
    }

    /// Canonical spec string for base kinds; `None` for derived rules.
    pub fn to_spec_string(&self) -> Option<String> {
        let prefix = match self.laterality {
            Laterality::Unilateral => "",
            Laterality::Bilateral => "bilateral:",
        };
        let body = match &self.kind {
            WeightKind::ExplicitList { values, tail } => {
                let csv = join_csv(values);
                match tail {
                    TailPolicy::RepeatLast => format!("list:{csv};tail=last"),
                    TailPolicy::DeclaredLimit(v) => format!("list:{csv};tail=limit={v}"),
                }
            }
            WeightKind::Periodic { values } => format!("periodic:{}", join_csv(values)),
            WeightKind::Expression { source, .. } => format!("expr:{source}"),
            WeightKind::Derived { .. } => return None,
        };
        Some(format!("{prefix}{body}"))
    }

    /// Short human-readable description of the rule shape.
    pub fn describe(&self) -> String {
        match &self.kind {
            WeightKind::ExplicitList { values, .. } => format!("list of {}", values.len()),
            WeightKind::Periodic { values } => format!("periodic of period {}", values.len()),
            WeightKind::Expression { source, .. } => format!("expression {source:?}"),
            WeightKind::Derived { base, map } => {
                let name = match map {
                    WeightMap::PairMean => "pair-mean",
                    WeightMap::PairGeometric => "pair-geometric",
                    WeightMap::PointwiseExp => "pointwise-exp",
                };
                format!("{name} of {}", base.describe())
            }
        }
    }
}

fn join_csv(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// Parses the textual weight-spec forms: `list:1,2,3[;tail=last|;tail=limit=<v>]`,
/// `periodic:3,1`, `expr:2+(-1)^i`, each optionally prefixed `bilateral:`.
pub fn parse_weight_spec(text: &str) -> Result<WeightSequence, WeightError> {
    let trimmed = text.trim();
    let (laterality, rest) = match trimmed.strip_prefix("bilateral:") {
        Some(rest) => (Laterality::Bilateral, rest),
        None => (Laterality::Unilateral, trimmed),
    };
    if let Some(body) = rest.strip_prefix("list:") {
        let mut sections = body.split(';');
        let values = parse_csv(sections.next().unwrap_or_default())?;
        let mut tail = TailPolicy::RepeatLast;
        for section in sections {
            let section = section.trim();
            if section == "tail=last" {
                tail = TailPolicy::RepeatLast;
            } else if let Some(v) = section.strip_prefix("tail=limit=") {
                let limit: f64 = v.trim().parse().map_err(|_| WeightError::BadSpecField {
                    detail: format!("tail limit {v:?} is not a number"),
                })?;
                tail = TailPolicy::DeclaredLimit(limit);
            } else {
                return Err(WeightError::BadSpecField {
                    detail: format!("unrecognized list option {section:?}"),
                });
            }
        }
        WeightSequence::explicit_list(values, tail, laterality)
    } else if let Some(body) = rest.strip_prefix("periodic:") {
        WeightSequence::periodic(parse_csv(body)?, laterality)
    } else if let Some(body) = rest.strip_prefix("expr:") {
        WeightSequence::expression(body, laterality)
    } else {
        Err(WeightError::UnknownSpecForm { found: trimmed.to_string() })
    }
}

fn parse_csv(body: &str) -> Result<Vec<f64>, WeightError> {
    if body.trim().is_empty() {
        return Err(WeightError::EmptyWeightList);
    }
    body.split(',')
        .map(|tok| {
            tok.trim().parse::<f64>().map_err(|_| WeightError::BadSpecField {
                detail: format!("weight value {:?} is not a number", tok.trim()),
            })
        })
        .collect()
}

fn pair_map_closed(values: &[f64], tail: TailPolicy, combine: fn(f64, f64) -> f64) -> WeightKind {
    let last = *values.last().expect("list is nonempty");
    let tail_value = match tail {
        TailPolicy::RepeatLast => last,
        TailPolicy::DeclaredLimit(limit) => limit,
    };
    let mut out: Vec<f64> = values.windows(2).map(|w| combine(w[0], w[1])).collect();
    out.push(combine(last, tail_value));
    WeightKind::ExplicitList { values: out, tail }
}

fn apply_map(alpha: &WeightSequence, map: WeightMap) -> WeightSequence {
    let combine: fn(f64, f64) -> f64 = match map {
        WeightMap::PairMean => |a, b| 0.5 * (a + b),
        WeightMap::PairGeometric => |a, b| (a * b).sqrt(),
        WeightMap::PointwiseExp => unreachable!("exp map uses exp_weights"),
    };
    let kind = match &alpha.kind {
        // One cyclic pass stays periodic with the same period, either side.
        WeightKind::Periodic { values } => {
            let p = values.len();
            let mapped = (0..p).map(|k| combine(values[k], values[(k + 1) % p])).collect();
            WeightKind::Periodic { values: mapped }
        }
        // A one-sided list keeps its closed form: pair maps of consecutive
        // values, then the (idempotent) tail. Two-sided lists extend left
        // with their first value, which a shifted list cannot represent, so
        // they fall through to the derived wrapper.
        WeightKind::ExplicitList { values, tail } if alpha.laterality == Laterality::Unilateral => {
            pair_map_closed(values, *tail, combine)
        }
        _ => WeightKind::Derived { base: Box::new(alpha.clone()), map },
    };
    let declared_sup = match &kind {
        WeightKind::Periodic { values } | WeightKind::ExplicitList { values, .. } => {
            let mut sup = values.iter().copied().fold(0.0f64, f64::max);
            if let WeightKind::ExplicitList { tail: TailPolicy::DeclaredLimit(l), .. } = &kind {
                sup = sup.max(*l);
            }
            Some(sup)
        }
        // Pair means and geometric means never exceed the original sup.
        _ => alpha.declared_sup,
    };
    WeightSequence { kind, laterality: alpha.laterality, declared_sup }
}

/// Weight map of the mean transform: `(alpha_i + alpha_{i+1}) / 2`.
///
/// Repeated structural application to expression rules stacks derived
/// wrappers (evaluation cost doubles per layer); for n-fold means use
/// [`shift_mean_iterate_weights`].
pub fn shift_mean_weights(alpha: &WeightSequence) -> WeightSequence {
    apply_map(alpha, WeightMap::PairMean)
}

/// Weight map of the Aluthge transform: `sqrt(alpha_i * alpha_{i+1})`.
pub fn shift_aluthge_weights(alpha: &WeightSequence) -> WeightSequence {
    apply_map(alpha, WeightMap::PairGeometric)
}

/// Pointwise exponential `beta_i = exp(alpha_i)`, closed-form for list and
/// periodic rules; errors if any exponential overflows.
pub fn exp_weights(alpha: &WeightSequence) -> Result<WeightSequence, WeightError> {
    let exp_checked = |index: i64, v: f64| -> Result<f64, WeightError> {
        let e = v.exp();
        if e.is_finite() {
            Ok(e)
        } else {
            Err(WeightError::Eval { index, source: EvalError::NonFinite })
        }
    };
    let kind = match &alpha.kind {
        WeightKind::Periodic { values } => {
            let mapped: Vec<f64> = values
                .iter()
                .enumerate()
                .map(|(i, &v)| exp_checked(i as i64, v))
                .collect::<Result<_, _>>()?;
            WeightKind::Periodic { values: mapped }
        }
        WeightKind::ExplicitList { values, tail } => {
            let mapped: Vec<f64> = values
                .iter()
                .enumerate()
                .map(|(i, &v)| exp_checked(i as i64, v))
                .collect::<Result<_, _>>()?;
            let tail = match tail {
                TailPolicy::RepeatLast => TailPolicy::RepeatLast,
                TailPolicy::DeclaredLimit(l) => {
                    TailPolicy::DeclaredLimit(exp_checked(values.len() as i64, *l)?)
                }
            };
            WeightKind::ExplicitList { values: mapped, tail }
        }
        _ => WeightKind::Derived { base: Box::new(alpha.clone()), map: WeightMap::PointwiseExp },
    };
    let declared_sup = match &kind {
        WeightKind::Periodic { values } | WeightKind::ExplicitList { values, .. } => {
            let mut sup = values.iter().copied().fold(0.0f64, f64::max);
            if let WeightKind::ExplicitList { tail: TailPolicy::DeclaredLimit(l), .. } = &kind {
                sup = sup.max(*l);
            }
            Some(sup)
        }
        _ => alpha.declared_sup.map(f64::exp).filter(|s| s.is_finite()),
    };
    Ok(WeightSequence { kind, laterality: alpha.laterality, declared_sup })
}

/// Weights of the n-th mean iterate on an index range:
/// `2^-n sum_j C(n,j) alpha_{i+j}`, binomial terms summed largest first.
pub fn shift_mean_iterate_weights(
    alpha: &WeightSequence,
    n: usize,
    i_range: Range<i64>,
) -> Result<Vec<f64>, WeightError> {
    if i_range.is_empty() {
        return Ok(Vec::new());
    }
    let window = mean_pmf_window(n);
    let lo = i_range.start + window.j_lo as i64;
    let hi = (i_range.end - 1) + window.j_hi() as i64;
    let buffer = alpha.weights_in(lo, hi)?;
    let mut out = Vec::with_capacity((i_range.end - i_range.start) as usize);
    for i in i_range.clone() {
        let base = (i - i_range.start) as usize;
        let mut acc = 0.0f64;
        for &k in &window.order {
            acc += window.weights[k] * buffer[base + k];
        }
        out.push(acc);
    }
    Ok(out)
}

/// One iterative checkpoint of the spectral-radius estimator.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RadiusCheckpoint {
    /// Window length of the two-point geometric-mean estimate.
    pub n: usize,
    pub estimate: f64,
}

/// Spectral-radius estimate for a one-sided weighted shift.
#[derive(Debug, Clone, Serialize)]
pub struct RadiusEstimate {
    pub value: f64,
    /// Iterative estimates at growing window lengths.
    pub diagnostics: Vec<RadiusCheckpoint>,
    /// True when a periodic closed form supplied the value.
    pub closed_form: bool,
}

/// Spectral radius `lim_n (sup_k prod_{j<n} alpha_{k+j})^{1/n}` of the
/// associated shift. Periodic rules use the exact closed form
/// `exp(mean of log weights)`; other rules use the two-point window
/// estimator `exp((S(2n) - S(n)) / n)` on log prefix sums, where
/// `S(n) = sup_{k <= i_max}` of the length-`n` window log-sum — the
/// difference cancels the head contribution that biases the plain quotient.
pub fn shift_spectral_radius(
    alpha: &WeightSequence,
    n_max: usize,
    i_max: usize,
) -> Result<RadiusEstimate, WeightError> {
    if alpha.laterality != Laterality::Unilateral {
        return Err(WeightError::NotUnilateral);
    }
    if let WeightKind::Periodic { values } = &alpha.kind {
        let p = values.len();
        let mean_log = values.iter().map(|v| v.ln()).sum::<f64>() / p as f64;
        let value = mean_log.exp();
        // Iterative cross-check at period-aligned window lengths: the sup
        // window log-sum is exactly n * mean_log there.
        let mut diagnostics = Vec::new();
        let mut n = p;
        while n <= n_max.max(p) {
            let window_sum: f64 = (0..n).map(|j| values[j % p].ln()).sum();
            diagnostics.push(RadiusCheckpoint { n, estimate: (window_sum / n as f64).exp() });
            n *= 2;
        }
        return Ok(RadiusEstimate { value, diagnostics, closed_form: true });
    }

    let n1 = (2 * (n_max / 4)).max(2);
    let needed = i_max as i64 + 2 * n1 as i64;
    let logs: Vec<f64> = alpha.weights_in(0, needed - 1)?.iter().map(|v| v.ln()).collect();
    let mut prefix = Vec::with_capacity(logs.len() + 1);
    prefix.push(0.0f64);
    for v in &logs {
        prefix.push(prefix.last().unwrap() + v);
    }
    let sup_window = |n: usize| -> f64 {
        (0..=i_max)
            .map(|k| prefix[k + n] - prefix[k])
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut diagnostics = Vec::new();
    let mut m = 2usize;
    while m < n1 {
        diagnostics.push(RadiusCheckpoint {
            n: m,
            estimate: ((sup_window(2 * m) - sup_window(m)) / m as f64).exp(),
        });
        m *= 2;
    }
    let value = ((sup_window(2 * n1) - sup_window(n1)) / n1 as f64).exp();
    diagnostics.push(RadiusCheckpoint { n: n1, estimate: value });
    Ok(RadiusEstimate { value, diagnostics, closed_form: false })
}

/// One scheduled order of the mean-limit estimator.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeanLimitCheckpoint {
    pub n: usize,
    /// `sup_i` of the n-th mean-iterate weights over the truncated range.
    pub sup_weight: f64,
    pub argmax_index: i64,
    /// Sup attained at the truncation boundary (possible truncation bias).
    pub at_boundary: bool,
}

/// Mean-limit estimate for a one-sided weighted shift.
#[derive(Debug, Clone, Serialize)]
pub struct ShiftMeanLimit {
    /// Last scheduled sup — the mean-limit estimate.
    pub value: f64,
    pub trace: Vec<MeanLimitCheckpoint>,
    /// Any checkpoint hit its truncation boundary.
    pub sup_at_boundary: bool,
}

/// Default schedule of iterate orders: 0, 1, 2, 4, …, 2^14.
pub fn default_n_schedule() -> Vec<usize> {
    let mut schedule = vec![0usize, 1];
    let mut n = 2usize;
    while n <= DEFAULT_SCHEDULE_MAX_N {
        schedule.push(n);
        n *= 2;
    }
    schedule
}

/// Index cap needed for an exact (or declared-budget) sup of the n-th
/// iterate weights: one period for periodic rules, list length plus one
/// pure-tail index for lists, `i_max` (default `10n + 1000`) for
/// expression-backed rules.
fn sup_cap(kind: &WeightKind, n: usize, i_max: Option<usize>) -> (i64, bool) {
    match kind {
        WeightKind::Periodic { values } => (values.len() as i64 - 1, false),
        WeightKind::ExplicitList { values, .. } => (values.len() as i64, false),
        WeightKind::Expression { .. } => (i_max.unwrap_or(10 * n + 1000) as i64, true),
        WeightKind::Derived { base, .. } => sup_cap(&base.kind, n, i_max),
    }
}

/// Sup of `shift_mean_iterate_weights` over the scheduled orders; the sup
/// sequence is non-increasing in `n` and its last value estimates the mean
/// limit. Passing `i_max = None` uses the per-order default truncation.
pub fn shift_mean_limit(
    alpha: &WeightSequence,
    n_schedule: &[usize],
    i_max: Option<usize>,
) -> Result<ShiftMeanLimit, WeightError> {
    if alpha.laterality != Laterality::Unilateral {
        return Err(WeightError::NotUnilateral);
    }
    let mut trace = Vec::with_capacity(n_schedule.len());
    let mut sup_at_boundary = false;
    for &n in n_schedule {
        let (cap, boundary_meaningful) = sup_cap(&alpha.kind, n, i_max);
        let values = shift_mean_iterate_weights(alpha, n, 0..cap + 1)?;
        let (argmax, sup) = values
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("range is nonempty");
        let at_boundary = boundary_meaningful && argmax as i64 == cap;
        sup_at_boundary |= at_boundary;
        trace.push(MeanLimitCheckpoint {
            n,
            sup_weight: sup,
            argmax_index: argmax as i64,
            at_boundary,
        });
    }
    let value = trace.last().map(|c| c.sup_weight).unwrap_or(0.0);
    Ok(ShiftMeanLimit { value, trace, sup_at_boundary })
}

/// The mean limit of `alpha` against the spectral radii of `alpha` and of
/// `exp(alpha)`: in the limit `mean_limit = log r(exp alpha) >= r(alpha)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BridgeReport {
    pub mean_limit: f64,
    /// `log` of the spectral radius of the exponentiated-weight shift.
    pub log_r_exp: f64,
    /// Spectral radius of the original shift.
    pub r_alpha: f64,
    /// `mean_limit - log_r_exp`; near zero at converged schedules.
    pub bridge_gap: f64,
    /// `log_r_exp - r_alpha`; nonnegative up to estimator error.
    pub order_margin: f64,
}

/// Probes for growth when no sup is declared: the sup over a doubled index
/// span must not keep increasing at the boundary.
fn check_bounded(alpha: &WeightSequence) -> Result<(), WeightError> {
    if alpha.declared_sup.is_some() {
        return Ok(());
    }
    match &alpha.kind {
        WeightKind::ExplicitList { .. } | WeightKind::Periodic { .. } => Ok(()),
        WeightKind::Derived { base, .. } => check_bounded(base),
        WeightKind::Expression { .. } => {
            let probe = 4096i64;
            let (_, sup1) = alpha.extrema(0, probe)?;
            let far = alpha.weights_in(probe + 1, 2 * probe)?;
            let (arg2, sup2) = far
                .iter()
                .copied()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("probe range is nonempty");
            let growing = sup2 > sup1 + 1e-6 * sup1.max(1.0);
            let at_boundary = arg2 as i64 + probe + 1 >= 2 * probe - 1;
            if growing && at_boundary {
                return Err(WeightError::Unbounded { probe: arg2 as i64 + probe + 1 });
            }
            Ok(())
        }
    }
}

/// Runs the full bridge at default schedules.
pub fn exp_log_bridge(alpha: &WeightSequence) -> Result<BridgeReport, WeightError> {
    if alpha.laterality != Laterality::Unilateral {
        return Err(WeightError::NotUnilateral);
    }
    check_bounded(alpha)?;
    let beta = exp_weights(alpha)?;
    let mean_limit = shift_mean_limit(alpha, &default_n_schedule(), None)?.value;
    let log_r_exp = shift_spectral_radius(&beta, DEFAULT_RADIUS_N_MAX, DEFAULT_RADIUS_I_MAX)?
        .value
        .ln();
    let r_alpha = shift_spectral_radius(alpha, DEFAULT_RADIUS_N_MAX, DEFAULT_RADIUS_I_MAX)?.value;
    Ok(BridgeReport {
        mean_limit,
        log_r_exp,
        r_alpha,
        bridge_gap: mean_limit - log_r_exp,
        order_margin: log_r_exp - r_alpha,
    })
}

/// Finite compression of the shift: `dim x dim` matrix with
/// `alpha_0 … alpha_{dim-2}` on the subdiagonal.
pub fn truncated_shift_matrix(
    alpha: &WeightSequence,
    dim: usize,
) -> Result<CMatrix, WeightError> {
    if alpha.laterality != Laterality::Unilateral {
        return Err(WeightError::NotUnilateral);
    }
    if dim < 2 {
        return Err(WeightError::DimensionTooSmall { dim });
    }
    let weights = alpha.weights_in(0, dim as i64 - 2)?;
    let mut m = CMatrix::zeros(dim, dim);
    for (i, &w) in weights.iter().enumerate() {
        m.set(i + 1, i, crate::C64::new(w, 0.0));
    }
    Ok(m)
}
