use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grade mismatch: {0} vs {1}")]
    GradeMismatch(usize, usize),

    #[error("grade too large for brute-force canonicalization: m = {m} > {max}")]
    GradeTooLarge { m: usize, max: usize },

    #[error("resource limit exceeded for {what}: {size} > {limit}")]
    ResourceLimit {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("arity mismatch: expected {expected} permutations, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("subsystem index {index} out of range for {k} subsystems")]
    SubsystemOutOfRange { index: usize, k: usize },

    #[error("not an m={m} label: {detail}")]
    WrongLabelGrade { m: usize, detail: String },

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::ResourceLimit { .. } | Error::GradeTooLarge { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
