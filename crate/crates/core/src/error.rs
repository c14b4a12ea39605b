use thiserror::Error;

/// Errors shared by every layer of the crate.
///
/// `Undecided` is not a failure of the input: it means a configured resource
/// bound was hit, or a decision procedure is outside its certified range. It
/// is never converted into a yes/no answer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable-list mismatch: {0}")]
    RingMismatch(String),
    #[error("coefficient field mismatch: {0}")]
    FieldMismatch(String),
    #[error("undecided: {0}")]
    Undecided(String),
    #[error("ill-defined ring map: {0}")]
    IllDefined(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_undecided(&self) -> bool {
        matches!(self, Error::Undecided(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
