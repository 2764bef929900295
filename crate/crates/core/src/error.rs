use thiserror::Error;

use crate::geometry::Wavevector;

/// Errors produced by the core numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported grid: dim = {dim}, n_per_axis = {n_per_axis} (need dim in {{1, 2}} and n_per_axis >= 8)")]
    InvalidGrid { dim: usize, n_per_axis: usize },

    #[error("grid mismatch: expected {expected} node values, got {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("non-finite value at node {node}")]
    NonFinite { node: usize },

    #[error("density is not strictly positive at node {node} (value {value})")]
    NonPositiveDensity { node: usize, value: f64 },

    #[error("density integrates to {integral}, expected 1")]
    NotNormalized { integral: f64 },

    #[error("weight function must be strictly positive (node {node})")]
    NonPositiveWeight { node: usize },

    #[error("mode cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: i32, right: i32 },

    #[error("mode cutoff {available} is smaller than the kernel support {needed}")]
    CutoffTooSmall { needed: i32, available: i32 },

    #[error("kernel coefficient for k = {k:?} is not matched by an equal coefficient at -k")]
    OddCoefficients { k: Wavevector },

    #[error("kernel coefficient for k = {k:?} is not a finite real number")]
    InvalidCoefficient { k: Wavevector },

    #[error("kernel matrix is not symmetric at ({i}, {j})")]
    AsymmetricMatrix { i: usize, j: usize },

    #[error("kernel is not a Mercer kernel (smallest eigenvalue {min_eigenvalue})")]
    NotMercer { min_eigenvalue: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("operation requires a translation-invariant kernel")]
    NeedsTranslationInvariant,

    #[error("bilinear form is not symmetric (deviation {deviation:e})")]
    AsymmetricForm { deviation: f64 },

    #[error("metric form is not positive definite")]
    IndefiniteMetric,

    #[error("drift magnitude {drift} exceeds the bound {bound}: occupation modes are corrupt")]
    DriftBound { drift: f64, bound: f64 },

    #[error("requested horizon ends at real time {needed}, past t_end = {t_end}")]
    HorizonTooLong { needed: f64, t_end: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
