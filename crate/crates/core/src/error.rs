use thiserror::Error;

use crate::basis::BasisId;

/// Errors raised by the disk spectral toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiskError {
    #[error("invalid Jacobi parameters (a={a}, b={b}): both must exceed -1")]
    JacobiParams { a: f64, b: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("radius {0} outside the unit interval [0, 1]")]
    RadiusDomain(f64),

    #[error("D- is undefined at m = 0 for {0}; use d_plus (the two coincide)")]
    LoweringAtZeroM(BasisId),

    #[error("k-lowering requires k >= 1, got {0}")]
    LoweringAtZeroK(BasisId),

    #[error("lattice mismatch: operator expects input in {expected} but receives {found}")]
    Composition { expected: BasisId, found: BasisId },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("N_r = {n_r} too small for {basis}; need at least {min}")]
    GridTooSmall {
        basis: BasisId,
        n_r: usize,
        min: usize,
    },

    #[error("singular pivot at index {0}")]
    Singular(usize),

    #[error("boundary row placement out of range: {0}")]
    Placement(String),

    #[error("Neumann recombination of {0} leaves the n = 0 mode undetermined; a gauge condition is required")]
    GaugeRequired(BasisId),

    #[error("eigensolver failed on a {size}x{size} pencil (condition estimate {condition:.3e}): {reason}")]
    EigenFailure {
        size: usize,
        condition: f64,
        reason: String,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, DiskError>;
