use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("rank mismatch: classification expects rank {expected}, singular values give {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("degenerate steady state: rate matrix has rank {0}, use the dark-state family solver")]
    DegenerateSteadyState(usize),

    #[error("steady state is unique (rank 3), not a dark-state family")]
    NotDegenerate,

    #[error("nullspace dimension {0} is not 1 or 2")]
    NullspaceDimension(usize),

    #[error("negative population {value:e} at level {level}")]
    NegativePopulation { level: usize, value: f64 },

    #[error("density matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("target population {target} is outside the reachable range [{min}, {max}]")]
    UnreachableTarget { target: f64, min: f64, max: f64 },

    #[error("step size underflow at t = {0}")]
    StepSizeUnderflow(f64),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid sweep axis: {0}")]
    InvalidAxis(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
