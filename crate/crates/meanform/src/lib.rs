//! meanform: a computational laboratory for the mean transform of operators.
//!
//! The mean transform of a square matrix `T` with canonical polar
//! decomposition `T = V |T|` is `(V|T| + |T|V) / 2`. This crate computes it
//! alongside the lambda-Aluthge transforms, iterates it, estimates the
//! limit of the iterate norms, classifies operators (normal, quasinormal,
//! p-hyponormal, partial isometries), samples numerical ranges, and carries
//! a symbolic weight calculus for weighted shift operators where all of
//! these admit closed forms.

pub mod binom;
pub mod classes;
pub mod cmatrix;
pub mod eig;
pub mod expr;
pub mod matrix_doc;
pub mod numrange;
pub mod polar;
pub mod verify;
pub mod weights;

pub use cmatrix::{CMatrix, MatrixError};
pub use eig::{
    eigenvalues_general, hermitian_eig, min_singular_value, operator_norm, psd_power, HermEig,
    LinalgError,
};
pub use matrix_doc::MatrixDocument;
pub use polar::{
    aluthge_transform, binomial_iterate, canonical_polar, mean_iterates, mean_limit_estimate,
    mean_transform, partial_isometry_mean, rank_one_mean_iterate, IterateStep, IterateTrace,
    MeanLimit, PolarParts, TransformError,
};
pub use verify::{run_all, run_suite, SuiteId, VerifyError, VerifyReport};
pub use weights::{
    exp_log_bridge, parse_weight_spec, shift_aluthge_weights, shift_mean_iterate_weights,
    shift_mean_limit, shift_mean_weights, shift_spectral_radius, truncated_shift_matrix,
    BridgeReport, Laterality, RadiusEstimate, ShiftMeanLimit, TailPolicy, WeightError,
    WeightSequence,
};

/// Complex scalar used across the crate.
pub type C64 = num_complex::Complex<f64>;
