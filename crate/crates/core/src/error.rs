use crate::model::Violation;
use crate::polytope::LpError;
use crate::scarf::ScarfError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("instance failed validation: {}", summarize(.0))]
    Invalid(Vec<Violation>),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("input flow is not stable: {0}")]
    Unstable(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Failures caused by the input rather than by a bug or a limit.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Invalid(_)
                | Error::Parse(_)
                | Error::Precondition(_)
                | Error::Unstable(_)
                | Error::Io(_)
        )
    }
}

fn summarize(v: &[Violation]) -> String {
    match v {
        [] => "no violations".into(),
        [one] => one.to_string(),
        [first, rest @ ..] => format!("{first} (and {} more)", rest.len()),
    }
}

impl From<ScarfError> for Error {
    fn from(e: ScarfError) -> Self {
        match e {
            ScarfError::PivotBudget { .. } => Error::ResourceLimit(e.to_string()),
            ScarfError::Invalid(m) | ScarfError::Internal(m) => Error::Internal(m),
        }
    }
}

impl From<LpError> for Error {
    fn from(e: LpError) -> Self {
        Error::Internal(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
