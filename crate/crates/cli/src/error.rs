use chernoff_core::ChernoffError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("property failure: {0}")]
    Property(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 usage, 2 numerical or i/o, 3 property failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) | CliError::Io(_) => 2,
            CliError::Property(_) => 3,
        }
    }

    /// Classifies a library error: bad inputs are usage errors, everything
    /// else is a numerical failure.
    pub fn from_core(context: &str, e: ChernoffError) -> Self {
        let msg = format!("{context}: {e}");
        match e {
            ChernoffError::InvalidGrid(_)
            | ChernoffError::InvalidRegulator(_)
            | ChernoffError::InvalidSpec(_)
            | ChernoffError::OrderOutOfRange { .. }
            | ChernoffError::InvalidParameter(_)
            | ChernoffError::OracleSizeCap { .. }
            | ChernoffError::BoundaryMass { .. }
            | ChernoffError::UnresolvedLevel { .. }
            | ChernoffError::BadDump(_)
            | ChernoffError::GridMismatch
            | ChernoffError::AxisOutOfRange { .. }
            | ChernoffError::LengthMismatch { .. } => CliError::Usage(msg),
            ChernoffError::NonFinite { .. } | ChernoffError::SeriesNotConverged { .. } | ChernoffError::Io(_) => {
                CliError::Numerical(msg)
            }
        }
    }
}
