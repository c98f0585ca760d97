use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument of zero vector undefined")]
    ZeroVector,

    #[error("invalid phase-shift set: {0}")]
    InvalidPhaseSet(String),

    #[error("phase index {index} out of range for a set of {k} phases")]
    PhaseIndexOutOfRange { index: usize, k: usize },

    #[error("invalid link budget: {0}")]
    InvalidBudget(String),

    #[error("element {index} has zero channel amplitude")]
    ZeroElement { index: usize },

    #[error("configuration has {got} entries but the realization has {expected} elements")]
    LengthMismatch { expected: usize, got: usize },

    #[error("rows are not sorted by element argument (row {row})")]
    UnsortedRows { row: usize },

    #[error("exhaustive search needs {needed} configurations, cap is {cap}")]
    CapExceeded { needed: u128, cap: u64 },

    #[error("direct path is zero so its direction is undefined; use the sweep optimizer")]
    ZeroDirectPath,

    #[error("overall channel amplitude must be positive")]
    ZeroChannel,

    #[error("reference capacity must be positive, got {0}")]
    NonPositiveCapacity(f64),

    #[error("incremental channel drifted by {relative:e} (relative) after {crossings} crossings")]
    Drift { relative: f64, crossings: usize },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("unknown preset scenario `{0}`")]
    UnknownPreset(String),

    #[error("schema version {found} is not supported (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("io: {0}")]
    Io(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
