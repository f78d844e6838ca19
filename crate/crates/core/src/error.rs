use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("matrix entry at ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension {d} is out of range: {reason}")]
    Dimension { d: usize, reason: &'static str },

    #[error("constraint violation: |tr A| = {trace_a:.3e}, |tr B| = {trace_b:.3e}, norm residual = {norm:.3e}")]
    Constraint { trace_a: f64, trace_b: f64, norm: f64 },

    #[error("matrix is not unitary (||U^H U - I||_F = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (max |M - M^H| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("pair is degenerate: both matrices are scalar multiples of the identity")]
    Degenerate,

    #[error("eigensolver did not converge")]
    NoConvergence,

    #[error("eigenvalue {value:.3e} of a positive semidefinite matrix is too negative")]
    NegativeEigenvalue { value: f64 },

    #[error("invalid permutation: {0}")]
    Permutation(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),
}
