use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected n = {expected}, got n = {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension n = {0} out of the supported range")]
    DimensionOutOfRange(usize),
    #[error("zero vector has no inverse")]
    ZeroVector,
    #[error("element is not invertible in the Clifford group")]
    NotInvertible,
    #[error("not a Clifford group element (defect {defect:e})")]
    NotInCliffordGroup { defect: f64 },
    #[error("invalid Clifford matrix: {0}")]
    InvalidMatrix(String),
    #[error("Bruhat decomposition needs a nonzero upper-left entry")]
    BruhatUndefined,
    #[error("point is mapped to infinity")]
    PointAtInfinity,
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("jet constant term is zero where a nonzero value is required")]
    ZeroConstantTerm,
    #[error("jet order {have} is below the required order {need}")]
    InsufficientOrder { have: usize, need: usize },
    #[error("singular point: the cocycle d* - b* x is not invertible")]
    SingularPoint,
    #[error("pole of the spectral function")]
    Pole,
    #[error("quadrature tail bound {bound:e} exceeds tolerance {tol:e}")]
    TailTooLarge { bound: f64, tol: f64 },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
