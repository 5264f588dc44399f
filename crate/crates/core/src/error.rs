use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("coefficient window ({k1}, {k2}) exceeds the Nyquist limit ({max1}, {max2}) of the grid")]
    NyquistExceeded {
        k1: usize,
        k2: usize,
        max1: usize,
        max2: usize,
    },

    #[error("function is not periodic")]
    NotPeriodic,

    #[error("grid period ({p1}, {p2}) is inconsistent with frequency spacing ({e1}, {e2})")]
    PeriodMismatch { p1: f64, p2: f64, e1: f64, e2: f64 },

    #[error("region lies outside the sample window: {0}")]
    OutOfWindow(String),

    #[error("grid does not resolve {0}")]
    UnderResolved(String),

    #[error("function is not in H1: coefficient {value:e} at ({m}, {n}) lies in the forbidden set")]
    NotInHardySpace { m: i64, n: i64, value: f64 },

    #[error("L1 norm is zero")]
    ZeroNorm,

    #[error("empty family: {0}")]
    EmptyFamily(&'static str),

    #[error("scale band ({lo}, {hi}] is not covered by the lift family")]
    ScaleBandNotCovered { lo: f64, hi: f64 },

    #[error("symbol modulus {0} exceeds 1")]
    SymbolBound(f64),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
