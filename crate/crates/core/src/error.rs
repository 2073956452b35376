use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("zero vector where a nonzero direction is required")]
    ZeroVector,

    #[error("invalid vector: {0}")]
    InvalidVector(String),

    #[error("invalid index space: {0}")]
    InvalidSpace(String),

    #[error("axis `{0}` is not part of the index space")]
    UnknownAxis(String),

    #[error("symbol {symbol} on axis `{axis}` is out of range for alphabet size {alphabet_size}")]
    SymbolOutOfRange {
        axis: String,
        symbol: usize,
        alphabet_size: usize,
    },

    #[error("function index is not total on the index space: {0}")]
    PartialIndex(String),

    #[error("missing direction for axis `{0}`")]
    MissingDirection(String),

    #[error("dense materialization of dimension {dim} exceeds the cap of {cap}")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("basis is not orthonormal: residual {residual:.3e} exceeds {tolerance:.1e}")]
    NotOrthonormal { residual: f64, tolerance: f64 },

    #[error("search budget exhausted after {iterations} iterations; best achieved {best:.6} > bound {bound:.6}")]
    BudgetExhausted {
        iterations: u64,
        best: f64,
        bound: f64,
    },

    #[error("level {level}: search budget exhausted; best ratio {best:.6} > target {target:.6}")]
    LevelBudgetExhausted { level: u32, best: f64, target: f64 },

    #[error("invalid stage: {0}")]
    InvalidStage(String),

    #[error("stage mismatch: {0}")]
    StageMismatch(String),

    #[error("invalid branch: {0}")]
    InvalidBranch(String),

    #[error("no separating level within depth {depth}: colliding prefixes {first} and {second}")]
    NoSeparatingLevel {
        depth: u32,
        first: String,
        second: String,
    },

    #[error("certificate check failed: {0}")]
    CertificateMismatch(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
