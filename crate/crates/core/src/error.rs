use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("expected {expected} opponent actions, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("action {value} outside [{low}, {high}]")]
    ActionOutOfRange { value: f64, low: f64, high: f64 },

    #[error("focal index {focal} out of range for {len} players")]
    FocalOutOfRange { focal: usize, len: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("degenerate sweep: {0}")]
    DegenerateSweep(String),

    #[error("{n} players exceeds the exhaustive enumeration cap of {cap}")]
    TooManyPlayers { n: usize, cap: usize },

    #[error("analytic mass {analytic} and Monte Carlo estimate {monte_carlo} differ by more than {bound}")]
    EstimateMismatch {
        analytic: f64,
        monte_carlo: f64,
        bound: f64,
    },

    #[error("sweep point {value}: {source}")]
    SweepPoint { value: f64, source: Box<Error> },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn out_of_range(msg: impl Into<String>) -> Self {
        Error::ParameterOutOfRange(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
