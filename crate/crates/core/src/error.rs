use thiserror::Error;

/// Everything that can go wrong inside the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: max asymmetry {asymmetry:e} exceeds {allowed:e}")]
    NotSymmetric { asymmetry: f64, allowed: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotSpd { row: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("system is not a frame (lower bound {lower:e} <= tolerance {tol:e})")]
    NotAFrame { lower: f64, tol: f64 },

    #[error("invalid projector: symmetry defect {symmetry:e}, idempotency defect {idempotency:e}, tolerance {tol:e}")]
    InvalidProjector { symmetry: f64, idempotency: f64, tol: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("range of operator {index} is numerically ambiguous: singular value {singular:e} near rank threshold {threshold:e}")]
    RankDeficiencyAmbiguous {
        index: usize,
        singular: f64,
        threshold: f64,
    },

    #[error("local bounds are degenerate (lower bound is zero)")]
    DegenerateLocalBounds,

    #[error("patch {patch} is not a frame for its block (lower bound {lower:e})")]
    LocalNotUniformFrame { patch: usize, lower: f64 },

    #[error("truncation too small: kernel reach {reach} exceeds a third of the {domain}-point domain")]
    TruncationTooSmall { reach: usize, domain: usize },

    #[error("shifted copy at shift {shift} leaves the domain [{start}, {end})")]
    ShiftOutOfDomain { shift: i64, start: i64, end: i64 },

    #[error("generator {generator} of patch {patch} is supported outside its block")]
    SupportViolation { patch: usize, generator: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
