//! Error types shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Operands have incompatible or non-square shapes.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A matrix fails the density-matrix invariants (Hermiticity, unit
    /// trace, positivity) beyond tolerance.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A scalar argument is outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Relative entropy diverges: the support condition is violated, the
    /// value is +∞ rather than a number.
    #[error("divergence: support of the first state is not contained in the second")]
    SupportViolation,

    /// A generator does not belong to the class an operation requires
    /// (e.g. non-unital input to a unital-only decomposition).
    #[error("classification error: {0}")]
    Classification(String),

    /// The hypothesis of the detailed-balance test does not apply to the
    /// given jump operators.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// State validity failed during integration; carries the offending time.
    #[error("integration failure at t = {t}: {detail}")]
    Integration { t: f64, detail: String },

    /// A closed-form denominator underflowed; carries the offending time.
    #[error("singularity at t = {t}: {detail}")]
    Singularity { t: f64, detail: String },

    /// Two series do not share a common grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Generic numerical failure (eigendecomposition, overflow).
    #[error("numerical error: {0}")]
    Numerical(String),
}
