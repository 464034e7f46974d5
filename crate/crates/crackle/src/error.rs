use thiserror::Error;

/// Errors produced by samplers, geometry kernels, homology and experiments.
#[derive(Debug, Error)]
pub enum CrackleError {
    #[error("power-law tail exponent must exceed the dimension: alpha = {alpha} <= d = {d} makes the density non-integrable")]
    NonIntegrableTail { alpha: f64, d: usize },

    #[error("dimension must be >= 1, got {0}")]
    BadDimension(usize),

    #[error("power-law model requires a tail exponent alpha")]
    MissingAlpha,

    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("empty point set")]
    EmptyPointSet,

    #[error("annulus bounds must satisfy 0 <= a < b, got a = {a}, b = {b}")]
    BadAnnulus { a: f64, b: f64 },

    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("minimal-cycle indicator needs exactly {expected} points for k = {k}, got {got}")]
    WrongCardinality { k: usize, expected: usize, got: usize },

    #[error("beta_{k} needs simplices of dimension {} enumerated, complex holds dimensions 0..={max_dim}", k + 1)]
    MissingBoundary { k: usize, max_dim: usize },

    #[error("exterior point count {count} exceeds the combinatorial cap {cap}; subset statistics refused")]
    CombinatorialCap { count: usize, cap: usize },

    #[error("iterated logarithm undefined: {formula} requires n >= {min_n}, got n = {n}")]
    IteratedLogUndefined {
        formula: &'static str,
        min_n: u64,
        n: u64,
    },

    #[error("radius formula yields a non-positive value at n = {n} (argument {arg})")]
    CoreRadiusUndefined { n: u64, arg: f64 },

    #[error("the Gaussian model defines only the k = 0 critical radius; k = {0} requested")]
    GaussianCriticalRadius(usize),

    #[error("no limit constant is defined for the Gaussian model")]
    GaussianMu,

    #[error("k = {k} outside the homology range 0..={max}")]
    BadHomologyDegree { k: usize, max: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, CrackleError>;
