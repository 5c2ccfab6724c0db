use crate::election::{Candidate, Voter};
use crate::treedecomp::Violation;

/// Errors raised by the solver library.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum Error {
    #[error("unknown voter index {0}")]
    UnknownVoter(u32),
    #[error("unknown candidate index {0}")]
    UnknownCandidate(u32),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("initiator {0:?} cannot be deleted")]
    InitiatorDeleted(Voter),
    #[error("self-loop on voter {0:?}")]
    SelfLoop(Voter),
    #[error("duplicate edge {0:?}-{1:?}")]
    DuplicateEdge(Voter, Voter),
    #[error("rival {0:?} equals the target candidate")]
    RivalIsTarget(Candidate),
    #[error("invalid tree decomposition: {}", format_violations(.0))]
    InvalidDecomposition(Vec<Violation>),
    #[error("decomposition is not pinned at the initiator")]
    NotPinned,
    #[error("decomposition is already pinned")]
    AlreadyPinned,
    #[error("enumeration over {size} items exceeds the limit of {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("invalid X3C instance: {0}")]
    InvalidX3c(String),
    #[error("invalid cover: {0}")]
    InvalidCover(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
