use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero has no leading term")]
    NoLeadingTerm,
    #[error("{0} is not a unit")]
    NotAUnit(String),
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unit group {group} is not valid over {ring}")]
    UnitGroup { ring: String, group: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("vector is not primitive: {0}")]
    NotPrimitive(String),
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("invalid closure data: {0}")]
    Closure(String),
    #[error("words do not chain: {0}")]
    Chaining(String),
    #[error("invalid document: {0}")]
    Document(String),
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }
}
