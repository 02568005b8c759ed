//! Crate-wide error type.

use crate::model::PartType;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A proposal violates its own invariants (e.g. non-positive scale).
    #[error("invalid proposal: {0}")]
    InvalidProposal(String),

    /// An operation was asked about a joint or relation that does not exist.
    #[error("domain error: {0}")]
    Domain(String),

    /// A descriptor was required but the proposal carries none.
    #[error("missing descriptor on a {0:?} proposal")]
    MissingDescriptor(PartType),

    /// A histogram region lies fully outside the image.
    #[error("region does not intersect the image")]
    EmptyRegion,

    /// Caller broke a documented precondition.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// Template construction left some part without any proposal.
    #[error("template incomplete: no surviving proposal for {0:?}")]
    TemplateIncomplete(PartType),

    /// Not enough annotated configurations to fit the kinematics model.
    #[error("under-determined kinematics model: {got} annotations, need at least {need}")]
    UnderDetermined { got: usize, need: usize },

    /// Exhaustive enumeration was requested on a graph above the size cap.
    #[error("graph too large for exhaustive enumeration: {vertices} vertices > {limit}")]
    SizeLimit { vertices: usize, limit: usize },

    /// A match produced no activated part, so no box can be reported.
    #[error("no detection: the best state leaves every part unmatched")]
    NoDetection,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::ContractViolation(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
