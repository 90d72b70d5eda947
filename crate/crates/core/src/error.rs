//! Crate-wide error type and result alias.

use thiserror::Error;

/// Errors produced by constructors, structure builders, sweeps, readers, and
/// the verification harness.
///
/// All numeric payloads are widened to `f64` so the error type stays
/// independent of the scalar parameter.
#[derive(Debug, Error)]
pub enum Error {
    /// Objects of two morphisms do not line up (composition, arithmetic,
    /// pairings, or a state handed to an operation expecting a different
    /// space).
    #[error("domain mismatch: expected {expected}, found {found}")]
    DomainMismatch { expected: String, found: String },

    /// Matrix or vector data whose shape disagrees with the declared objects.
    #[error("shape mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    /// An index (1-based basis index, mode number, grid point, dimension)
    /// outside its valid range.
    #[error("index out of range: {what} = {value}, valid range {range}")]
    IndexOutOfRange {
        what: &'static str,
        value: i64,
        range: String,
    },

    /// A requested tensor-factor boundary does not split the object's basis
    /// factors, or matrix dimensions do not factor as requested.
    #[error("shape does not factor: {0}")]
    ShapeNotFactorable(String),

    /// A supplied family of vectors (or a custom basis) is not orthonormal to
    /// tolerance.
    #[error("family not orthonormal: residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotOrthonormal { residual: f64, tolerance: f64 },

    /// A supplied state is not normalized to tolerance.
    #[error("state not normalized: norm {norm} differs from 1 by more than {tolerance:e}")]
    NotNormalized { norm: f64, tolerance: f64 },

    /// A residual evaluated to NaN, a negative value, or a non-finite value
    /// during a sweep.
    #[error("residual not finite at parameter {parameter}: {value}")]
    ResidualNotFinite { parameter: u64, value: f64 },

    /// Invalid run configuration: bad suite parameters, a non-ascending or
    /// too-short sweep grid, a nonpositive tolerance or length, a malformed
    /// configuration file, or conflicting options.
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    /// One or more checks failed in a harness run.
    #[error("{failed} of {total} checks failed")]
    CheckFailed { failed: usize, total: usize },

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed matrix text data.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;
