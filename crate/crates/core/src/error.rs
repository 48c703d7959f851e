use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("incomplete frame: {0}")]
    IncompleteFrame(String),
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("unsupported force law: {0}")]
    UnsupportedLaw(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid mesh: {0}")]
    Mesh(String),
    #[error("mesh is not watertight: {0}")]
    NotWatertight(String),
    #[error("degenerate triangle {0}")]
    DegenerateTriangle(usize),
    #[error("collision list is empty")]
    EmptyCollisions,
    #[error("invalid grasp state: {0}")]
    InvalidState(String),
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("step failed at t={t:.6}: {message}")]
    StepFailure { t: f64, message: String },
    #[error("calibration refused: {0}")]
    CalibrationRefused(String),
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable short tag, used by the CLI's one-line error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::IncompleteFrame(_) => "incomplete-frame",
            Error::LayoutMismatch(_) => "layout-mismatch",
            Error::UnsupportedLaw(_) => "unsupported-law",
            Error::Parse { .. } => "parse",
            Error::Mesh(_) => "mesh",
            Error::NotWatertight(_) => "not-watertight",
            Error::DegenerateTriangle(_) => "degenerate-triangle",
            Error::EmptyCollisions => "empty-collisions",
            Error::InvalidState(_) => "invalid-state",
            Error::InsufficientSamples(_) => "insufficient-samples",
            Error::InvariantViolation(_) => "invariant-violation",
            Error::StepFailure { .. } => "step-failure",
            Error::CalibrationRefused(_) => "calibration-refused",
            Error::UnknownScenario(_) => "unknown-scenario",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
