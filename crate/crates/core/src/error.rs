use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("integer flux {0} can be gauged away")]
    IntegerFlux(f64),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("angular resolution too low: {samples} samples cannot resolve mode {mode}")]
    Resolution { samples: usize, mode: i64 },

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("kernel evaluated on the diagonal x = y")]
    Diagonal,

    #[error("grid error: {0}")]
    Grid(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("oscillation budget exceeded: {0}")]
    Budget(String),

    #[error("high-energy tail estimate {estimate:e} exceeds tolerance {tol:e}")]
    Tail { estimate: f64, tol: f64 },

    #[error("data error: {0}")]
    Data(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("zero-resonance assumption violated: margin {margin:e} in mode {mode}")]
    Resonance { margin: f64, mode: i64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
