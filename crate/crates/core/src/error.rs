//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors reported by constructors, geometric operations, and steppers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    /// A matrix inverse or square root was requested on input whose condition
    /// number exceeds the supported limit.
    #[error("ill-conditioned input in {context}: condition number {cond:.3e} exceeds {limit:.3e}")]
    IllConditioned {
        context: &'static str,
        cond: f64,
        limit: f64,
    },

    /// A positive-definite matrix was required but the smallest eigenvalue is
    /// not positive.
    #[error("{context}: matrix is not positive definite (min eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite {
        context: &'static str,
        min_eig: f64,
    },

    /// The matrix fails `S^T J S = J` beyond the stated tolerance.
    #[error("matrix is not symplectic: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotSymplectic { residual: f64, tol: f64 },

    /// The covariance fails `Sigma J Sigma = J`, so it does not come from a
    /// pure Gaussian state.
    #[error("not a pure-state covariance: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotPureState { residual: f64, tol: f64 },

    /// The denominator of a Möbius action is numerically singular. This
    /// cannot occur for a symplectic matrix acting on a valid point and
    /// signals a tolerance breach upstream.
    #[error("degenerate Möbius action: denominator is numerically singular")]
    DegenerateAction,

    /// A linear solve inside a time step became singular; retry with a
    /// smaller step.
    #[error("time step too large in {context}; retry with a smaller dt")]
    StepTooLarge { context: &'static str },

    /// The untangling map is undefined at `alpha = 0`.
    #[error("untangling map is singular at alpha = 0")]
    SingularUntangle,

    /// An ensemble operation needs at least one sample.
    #[error("ensemble is empty")]
    EmptyEnsemble,

    /// Mismatched vector or matrix dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, CoreError>;
