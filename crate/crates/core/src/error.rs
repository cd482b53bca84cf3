use thiserror::Error;

/// Every failure the toolkit can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is even and has no inverse modulo a power of two")]
    EvenNotInvertible(String),
    #[error("{0} has negative 2-adic valuation")]
    NotTwoAdicallyIntegral(String),
    #[error("input must be positive")]
    ZeroInput,
    #[error("index order violated: {0}")]
    IndexOrder(String),
    #[error("index out of range: {0}")]
    IndexRange(String),
    #[error("element is not in the span of the g-basis in degree {degree}: {reason}")]
    NotInSpan { degree: u32, reason: String },
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("diagonal entry {index} is not a unit")]
    NonUnitDiagonal { index: usize },
    #[error("superdiagonal entry ({index}, {}) is not a unit", index + 1)]
    NonUnitSuperdiagonal { index: usize },
    #[error("no odd pivot for unknown {unknown} during elimination")]
    NonUnitPivot { unknown: String },
    #[error("input outside the solver's hypothesis class: {0}")]
    HypothesisViolation(String),
    #[error("division by a non-unit while extracting column {column}, row {row}")]
    NonUnitDivision { column: usize, row: usize },
    #[error("matrix size {size} is smaller than the product length {n}")]
    SizeTooSmall { size: usize, n: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
