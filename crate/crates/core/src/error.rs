use thiserror::Error;

/// Errors raised by validation predicates and numerical kernels.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("not Hermitian: entrywise deviation {gap:.3e} exceeds tolerance {tol:.1e}")]
    NotHermitian { gap: f64, tol: f64 },

    #[error("not positive semidefinite: eigenvalue {eigenvalue:.6e} lies below -{tol:.1e}")]
    NotPositive { eigenvalue: f64, tol: f64 },

    #[error("trace must equal 1: found {trace:.12} (tolerance {tol:.1e})")]
    NotUnitTrace { trace: f64, tol: f64 },

    #[error(
        "state is not full rank: minimum eigenvalue {min_eigenvalue:.6e} is below the \
         full-rank threshold {threshold:.1e}"
    )]
    RankDeficient { min_eigenvalue: f64, threshold: f64 },

    #[error(
        "POVM effects must sum to the identity: deviation {gap:.3e} exceeds tolerance {tol:.1e}"
    )]
    PovmIncomplete { gap: f64, tol: f64 },

    #[error(
        "Kraus operators are not trace preserving: sum of K\u{2020}K deviates from the identity \
         by {gap:.3e} (tolerance {tol:.1e})"
    )]
    NotTracePreserving { gap: f64, tol: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
