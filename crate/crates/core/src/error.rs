use thiserror::Error;

use crate::propagator::SeriesTrace;

pub type Result<T> = std::result::Result<T, ChernoffError>;

#[derive(Debug, Error)]
pub enum ChernoffError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("axis {axis} out of range for a {d}-dimensional grid")]
    AxisOutOfRange { axis: usize, d: usize },

    #[error("non-finite sample at x = {coord:?}")]
    NonFinite { coord: Vec<f64> },

    #[error("value length {got} does not match grid size {expected}")]
    LengthMismatch { got: usize, expected: usize },

    #[error("invalid regulator: {0}")]
    InvalidRegulator(String),

    #[error("invalid hamiltonian: {0}")]
    InvalidSpec(String),

    #[error("order k = {k} outside 1..={max}")]
    OrderOutOfRange { k: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("taylor series did not converge within {} terms", .trace.terms_used)]
    SeriesNotConverged { trace: SeriesTrace },

    #[error("dense oracle limited to {cap} grid points, got {size}")]
    OracleSizeCap { size: usize, cap: usize },

    #[error("gaussian boundary mass {mass:e} exceeds 1e-12")]
    BoundaryMass { mass: f64 },

    #[error("eigenstate level {level} is not resolved on this grid ({reason})")]
    UnresolvedLevel { level: usize, reason: String },

    #[error("malformed wavefunction dump: {0}")]
    BadDump(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
