use thiserror::Error;

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameters: {constraint} violated ({detail})")]
    InvalidParams {
        constraint: &'static str,
        detail: String,
    },
    #[error("belief {value} outside [0,1]")]
    InvalidBelief { value: f64 },
    #[error("prior #{index} = {value} outside [0,1]")]
    InvalidPrior { index: usize, value: f64 },
    #[error("team has no members")]
    EmptyTeam,
    #[error("team has {team} members but parameters declare N = {params}")]
    TeamSizeMismatch { team: usize, params: usize },
    #[error("player index {index} out of range for a team of {len}")]
    PlayerOutOfRange { index: usize, len: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("point outside the domain: {0}")]
    Domain(String),
    #[error("odd number of workers ({0}); pairing needs an even count")]
    OddWorkforce(usize),
    #[error("{0} workers exceed the exact-mode limit of {limit}", limit = crate::matching::EXACT_LIMIT)]
    TooManyForExact(usize),
    #[error("operation requires an analytic workforce")]
    NotAnalytic,
    #[error("invalid workforce: {0}")]
    InvalidWorkforce(String),
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for ModelError {
    fn from(e: std::io::Error) -> Self {
        ModelError::Io(e.to_string())
    }
}
