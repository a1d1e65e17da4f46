use thiserror::Error;

use crate::power::PowerEstimate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("matrix has {len} entries, expected {expected}")]
    BadShape { len: usize, expected: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("not Hermitian: max |A_ij - conj(A_ji)| = {residual:e}")]
    NotHermitian { residual: f64 },

    #[error("trace is not one: |Tr - 1| = {residual:e}")]
    TraceNotOne { residual: f64 },

    #[error("not positive semidefinite: minimum eigenvalue = {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("not normalized: |norm^2 - 1| = {residual:e}")]
    NotNormalized { residual: f64 },

    #[error("not unitary: max |(U^dag U - I)_ij| = {residual:e}")]
    NotUnitary { residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("no optimizer restart converged (best value {})", partial.value)]
    NotConverged { partial: Box<PowerEstimate> },

    #[error("generator limit did not converge: extrapolated estimates {estimates:?}")]
    LimitNotConverged { estimates: Vec<f64> },

    #[error(
        "reported value {reported} disagrees with re-evaluated gain {reevaluated} of the achiever"
    )]
    InconsistentEstimate { reported: f64, reevaluated: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
