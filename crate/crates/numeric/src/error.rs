use dspkit::Verdict;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] dspkit::Error),
    #[error("spectrum mismatch: {0}")]
    SpectrumMismatch(String),
    #[error("no witness found after {restarts} restarts (this is not a proof of non-existence)")]
    SolverFailed { restarts: usize },
    #[error("decided {verdict}; pass force to attempt a construction anyway")]
    DecidedUnsolvable { verdict: Verdict },
    #[error("eigenvalues are not generic: {0}")]
    NonGenericEigenvalues(String),
    #[error("size {n} exceeds the configured cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("centralizer has dimension {0}, deformation needs a trivial centralizer")]
    CentralizerNotTrivial(usize),
    #[error("continuation diverged at t = {t}")]
    ContinuationDiverged { t: f64 },
    #[error("invalid deformation target: {0}")]
    InvalidPath(String),
    #[error("invalid matrix tuple: {0}")]
    InvalidTuple(String),
    #[error("numerical inconsistency: {0}")]
    Inconsistent(String),
}
