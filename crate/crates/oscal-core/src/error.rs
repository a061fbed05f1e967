//! Error type shared across the verification kernel.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("eigensolver did not converge for dimension {dim}")]
    EighConvergence { dim: usize },

    #[error("cutoff {given} is below the minimum {minimum}")]
    CutoffTooSmall { given: usize, minimum: usize },

    #[error("buffer {buffer} leaves no interior states at cutoff {cutoff}")]
    EmptyInterior { buffer: usize, cutoff: usize },

    #[error("unit system must have strictly positive constants")]
    NonPositiveUnits,

    #[error("involution check failed: {reason}")]
    InvalidInvolution { reason: String },

    #[error("structure tensor is not antisymmetric: f[{a}][{b}] != -f[{b}][{a}]")]
    NotAntisymmetric { a: usize, b: usize },

    #[error("generator index {index} out of range for dimension {dim}")]
    GeneratorOutOfRange { index: usize, dim: usize },

    #[error("symbolic engine cannot represent the result: {reason}")]
    FamilyClosure { reason: String },

    #[error("probe point radius {radius} outside the admissible window [{min}, {max}]")]
    ProbeRadius { radius: f64, min: f64, max: f64 },

    #[error("radial problem is invalid: {reason}")]
    RadialProblem { reason: String },

    #[error(
        "operator is not block diagonal over the supplied sectors (off-block norm {norm:.3e})"
    )]
    NotBlockDiagonal { norm: f64 },

    #[error("{0}")]
    Invalid(String),
}
