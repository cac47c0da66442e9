use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degree {degree} is out of range in dimension {dim}")]
    DegreeOutOfRange { degree: usize, dim: usize },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("degenerate plane: basis vectors are linearly dependent")]
    DegeneratePlane,
    #[error("plane has no orthonormal basis over the rationals: {0}")]
    NotExactlyOrthonormalizable(String),
    #[error("vector is not normal to the plane: {0}")]
    NotNormal(String),
    #[error("tensor is not symmetric")]
    NotSymmetric,
    #[error("2-form is not in Λ²₁₄ (Λ²₇ component {0})")]
    NotInLambda2_14(String),
    #[error("not a G2 3-form: {0}")]
    NotG2Form(String),
    #[error("plane is not coassociative: {0}")]
    NotCoassociative(String),
    #[error("structure constants fail the Jacobi identity at (e{i}, e{j}, e{k})")]
    Jacobi { i: usize, j: usize, k: usize },
    #[error("structure constants are not antisymmetric at c^{k}_{{{i}{j}}}")]
    NotAntisymmetric { k: usize, i: usize, j: usize },
    #[error("dφ ≠ 0: {0}")]
    NotClosed(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("vertical subspace is not an ideal: [e{i}, e{v}] has horizontal component")]
    NotAnIdeal { i: usize, v: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("surface is not minimal: max |H| = {max_h:e}")]
    NotMinimal { max_h: f64 },
    #[error("degenerate induced metric at parameter {location:?}")]
    DegenerateMetric { location: Vec<f64> },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported search bound: {0}")]
    UnsupportedSearch(String),
}
