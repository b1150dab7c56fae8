use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong while building or evaluating a scenario.
///
/// Validation variants carry the numeric residual of the violated invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian: max |m - m^dagger| = {residual:.3e}")]
    Hermiticity { residual: f64 },
    #[error("matrix is not PSD: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    Convergence { sweeps: usize, off_norm: f64 },
    #[error("state trace is {trace:.12}, expected 1 (residual {residual:.3e})")]
    Trace { trace: f64, residual: f64 },
    #[error("POVM elements do not sum to identity: max deviation {residual:.3e}")]
    Completeness { residual: f64 },
    #[error("post-measurement unitary {index} is not unitary: max |U^dagger U - 1| = {residual:.3e}")]
    Unitarity { index: usize, residual: f64 },
    #[error("table shapes do not match: {0}")]
    Shape(String),
    #[error("expected {expected} parameters, got {found}")]
    ParamCount { expected: usize, found: usize },
    #[error("decoded normalizer is singular: smallest eigenvalue {min_eigenvalue:.3e}")]
    Singular { min_eigenvalue: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid table: {0}")]
    Table(String),
}
