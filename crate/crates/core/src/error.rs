use thiserror::Error;

/// Errors raised by grid, system and history constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("n_points must be even, got {0}")]
    OddPoints(usize),
    #[error("n_points must be at least 4, got {0}")]
    TooFewPoints(usize),
    #[error("window must be positive and finite, got {0}")]
    BadWindow(f64),
    #[error("matrix is not Hermitian: max |H - H^dagger| = {max_asymmetry:e}")]
    NotHermitian { max_asymmetry: f64 },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("states live on different time grids")]
    GridMismatch,
    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),
    #[error("no support at this clock reading (row norm {0:e})")]
    NoSupport(f64),
    #[error("clock index {index} out of range for {n_points} points")]
    IndexOutOfRange { index: usize, n_points: usize },
    #[error("window too small, need L >= {required} (got L = {window})")]
    WindowTooSmall { required: f64, window: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("dense oracle mode is limited to N <= 32 and d <= 4 (got N = {n_points}, d = {dim})")]
    OracleTooLarge { n_points: usize, dim: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
