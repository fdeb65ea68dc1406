use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix must be non-empty")]
    Empty,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("weight is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("weight is not positive semidefinite (eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("weight must be nonzero")]
    ZeroWeight,

    #[error("|q| must lie in (0, 1], got {0}")]
    InvalidQ(f64),

    #[error("self inner product has imaginary part {0:e}")]
    NonRealSelfInner(f64),

    #[error("operator is not A-bounded (null-space leakage {0:e})")]
    NotABounded(f64),

    #[error("weight rank {rank} is too low for |q| < 1")]
    RankTooLow { rank: usize },

    #[error("pair input violates its preconditions (residual {0:e})")]
    InvalidPairInput(f64),

    #[error("pair constraint residual {0:e} exceeds tolerance")]
    ConstraintResidual(f64),

    #[error("could not draw an A-orthogonal partner after {0} attempts")]
    GramSchmidtBreakdown(usize),

    #[error("closed form requires real q in [0, 1]")]
    ComplexQUnsupported,

    #[error("q = {q} outside the supported range [{lo}, {hi}]")]
    QOutOfRange { q: f64, lo: f64, hi: f64 },

    #[error("grid oracle supports reduced dimension <= 3, got {0}")]
    OracleDimension(usize),

    #[error("expected a {expected}x{expected} matrix, got {got}x{got}")]
    WrongSize { expected: usize, got: usize },

    #[error("composite q-parameter outside (0, 1] (modulus {0})")]
    SkippedDomain(f64),

    #[error("law requires q != 1")]
    QIsOne,

    #[error("denominator estimate {0:e} too close to zero")]
    NearZeroDenominator(f64),

    #[error("{law}: envelope violated at n = {index} by {excess:e}")]
    EnvelopeViolated {
        law: &'static str,
        index: usize,
        excess: f64,
    },

    #[error("sequence does not converge in the A-seminorm: {0}")]
    NotConvergent(String),

    #[error("invalid matrix json: {0}")]
    Json(String),
}

impl Error {
    /// Errors that only mean "this instance is outside the law's domain".
    pub fn is_skip(&self) -> bool {
        matches!(
            self,
            Error::SkippedDomain(_) | Error::QIsOne | Error::NearZeroDenominator(_) | Error::RankTooLow { .. }
        )
    }
}
