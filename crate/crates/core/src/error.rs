use std::path::PathBuf;

/// Errors produced anywhere in the stack.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A physical or model parameter is out of its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// A caller broke an operation's input contract (shapes, windows, warmup).
    #[error("contract violation: {0}")]
    Contract(String),
    /// Training produced non-finite values or diverged.
    #[error("training fault: {0}")]
    TrainingFault(String),
    /// Configuration file rejected during validation.
    #[error("config error: {0}")]
    Config(String),
    /// Weight file could not be decoded.
    #[error("weight file error: {0}")]
    WeightFormat(String),
    /// The robot pose lies inside an obstacle or outside the map.
    #[error("robot pose ({x:.3}, {y:.3}) is inside an obstacle")]
    Collision { x: f64, y: f64 },
    /// A homogeneous point mapped to infinity.
    #[error("degenerate homogeneous coordinate w = {0:e}")]
    DegeneratePoint(f64),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than a runtime fault.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Parameter(_) | Error::Config(_) | Error::WeightFormat(_) | Error::Json(_) => true,
            Error::Io { source, .. } => source.kind() == std::io::ErrorKind::NotFound,
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
