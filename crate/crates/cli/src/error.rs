use psi3_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad input: {0}")]
    Input(String),
}

impl CliError {
    /// 1 is reserved for failed checks and 2 for bad flags.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(..) => 3,
            CliError::Json(_) | CliError::Csv(_) | CliError::Input(_) => 4,
            CliError::Core(e) => match e {
                Error::EvenNotInvertible(_) => 10,
                Error::NotTwoAdicallyIntegral(_) => 11,
                Error::ZeroInput => 12,
                Error::IndexOrder(_) => 13,
                Error::IndexRange(_) => 14,
                Error::NotInSpan { .. } => 15,
                Error::SizeMismatch(_) => 16,
                Error::NonUnitDiagonal { .. } => 17,
                Error::NonUnitSuperdiagonal { .. } => 18,
                Error::NonUnitPivot { .. } => 19,
                Error::HypothesisViolation(_) => 20,
                Error::NonUnitDivision { .. } => 21,
                Error::SizeTooSmall { .. } => 22,
                Error::InvalidParameter(_) => 23,
            },
        }
    }
}
