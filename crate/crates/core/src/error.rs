use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported dimension {0} (only 1 and 2 are supported)")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("empty shape where a non-empty one is required")]
    EmptyShape,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(
        "insufficient margin: output points {missing:?} need inputs outside the pattern shape"
    )]
    Margin { missing: Vec<Vec<i64>> },
    #[error("symbol {symbol} out of range for alphabet of size {size}")]
    Symbol { symbol: u32, size: usize },
    #[error("coverage gap: pattern {pattern} is not covered by any element")]
    CoverageGap { pattern: String },
    #[error("infeasible instance: {0}")]
    Infeasible(String),
    #[error("degenerate system: {0}")]
    Degenerate(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("not a factor map: {0}")]
    FactorViolation(String),
    #[error("infeasible annulus at n = {n}: need {needed} points, annulus has {available}")]
    InfeasibleAnnulus {
        n: usize,
        needed: usize,
        available: usize,
    },
    #[error("scale selection failed: {0}")]
    ScaleSelection(String),
    #[error("degenerate cover: points {first} and {second} agree on the required radius {radius}")]
    DegenerateTuple {
        first: usize,
        second: usize,
        radius: usize,
    },
    #[error("config error at {pointer}: {message}")]
    Config { pointer: String, message: String },
    #[error("io error: {0}")]
    Io(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
