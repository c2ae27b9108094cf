use thiserror::Error;

/// Errors raised across the crate.
///
/// Variants are grouped so front ends can map them onto exit codes:
/// precision failures, domain failures and malformed input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("no sign change on the search interval")]
    NoRoot,
    #[error("degenerate approximant: root is not greater than 1")]
    DegenerateApproximant,
    #[error("word contains no run of 0 or of the top digit")]
    NoRuns,
    #[error("insufficient depth: {0}")]
    InsufficientDepth(String),
    #[error("word is not self-admissible")]
    NotSelfAdmissible,
    #[error("word is not admissible: {0}")]
    NotAdmissible(String),
    #[error("horizon too deep: {0}")]
    HorizonTooDeep(String),
    #[error("finiteness of the expansion of one is undecided at depth {0}")]
    UndecidedFiniteness(usize),
    #[error("infeasible parameters: {0}")]
    InfeasibleParameters(String),
    #[error("invalid digit set: {0}")]
    InvalidDigitSet(String),
    #[error("prefix condition failed: {0}")]
    PrefixConditionFailed(String),
    #[error("depth exceeded: requested {requested}, available {available}")]
    DepthExceeded { requested: u64, available: u64 },
    #[error("cylinder is not in the support of the measure: {0}")]
    NotInSupport(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn is_precision(&self) -> bool {
        matches!(self, Error::PrecisionExhausted(_) | Error::UndecidedFiniteness(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
