use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(usize),
    #[error("generator index {index} out of range for genus {genus}")]
    GeneratorOutOfRange { index: usize, genus: usize },
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("invalid group specification: {0}")]
    InvalidGroup(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix violates the group constraint (deviation {0:e})")]
    NotInGroup(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("refinement did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("representation is not flat (residual {0:e})")]
    NotFlat(f64),
    #[error("rank decision ambiguous: normalized singular value {0:e} lies in the indeterminate band")]
    RankAmbiguous(f64),
    #[error("cochain is not a cocycle (residual {0:e})")]
    NotCocycle(f64),
    #[error("fundamental cycle failed the descent self-test (residual {0:e})")]
    DescentFailure(f64),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("quadrature did not converge (relative drift {drift:e} between orders {order} and {doubled})")]
    QuadratureNotConverged { order: usize, doubled: usize, drift: f64 },
    #[error("degenerate period data: {0}")]
    DegeneratePeriods(String),
    #[error("representation is not irreducible")]
    Reducible,
}

pub type Result<T> = core::result::Result<T, Error>;
