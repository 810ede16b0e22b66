use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid radar configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("velocity grid is ambiguous: max 2|v| = {max_speed:.6} m/s exceeds c/(2 f0 T) = {limit:.6} m/s")]
    AmbiguousGrid { max_speed: f64, limit: f64 },

    #[error("index out of range: {what} = {index}, bound {bound}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("invalid SNR {0}: must be finite and > 0")]
    InvalidSnr(f64),

    #[error("estimate/truth count mismatch: {estimates} estimates for {truth} targets")]
    CountMismatch { estimates: usize, truth: usize },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("insufficient data for fit: {0}")]
    InsufficientData(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("geometry check failed: {0}")]
    Geometry(String),

    #[error("malformed data file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status: 2 for configuration problems, 3 for geometry
    /// problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidConfig(_) | Error::InvalidSnr(_) | Error::Format(_) => 2,
            Error::Geometry(_) | Error::DegenerateGeometry(_) | Error::AmbiguousGrid { .. } => 3,
            _ => 1,
        }
    }
}
