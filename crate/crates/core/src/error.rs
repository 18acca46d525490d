use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid Jordan normal form: {0}")]
    InvalidForm(String),
    #[error("invalid class tuple: {0}")]
    InvalidTuple(String),
    #[error("invalid eigenvalue assignment: {0}")]
    InvalidAssignment(String),
    #[error("cannot parse rational {input:?}: {reason}")]
    ParseRational { input: String, reason: String },
    #[error("relation enumeration needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("polymultiplicity vector is not simple (gcd {0}); no generic additive eigenvalues exist")]
    NonSimplePmv(u64),
    #[error("no generic assignment found after {0} attempts")]
    RetriesExhausted(usize),
    #[error("the reduction map is undefined here: {0}")]
    PsiUndefined(String),
    #[error("eigenvalues are required but not attached")]
    MissingEigenvalues,
    #[error("partition sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("operation ({s},{l}) needs blocks of sizes {s} and {l}")]
    PartsAbsent { s: usize, l: usize },
    #[error("source partition is not below the target in closure order")]
    NotComparable,
    #[error("cannot bump {k} blocks of a partition with {blocks} blocks")]
    KTooLarge { k: usize, blocks: usize },
    #[error("invalid problem file: {0}")]
    Problem(String),
}
