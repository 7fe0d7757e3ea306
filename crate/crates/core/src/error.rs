//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("scale parameter must be positive and finite")]
    InvalidScale,
    #[error("non-finite parameter or argument")]
    NonFinite,
    #[error("probability {0} outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("return period {r} does not exceed the block length {b}")]
    PeriodNotBeyondBlock { r: f64, b: u32 },
    #[error("input is empty")]
    Empty,
    #[error("series length {0} is not a whole number of 365-day years")]
    RaggedSeries(usize),
    #[error("series spans {got} years, need at least {need}")]
    SeriesTooShort { need: usize, got: usize },
    #[error("grouping factor {b} exceeds the {n} available blocks")]
    BlockTooLong { b: usize, n: usize },
    #[error("{got} observations are too few (need at least {need})")]
    TooFewObservations { need: usize, got: usize },
    #[error("orientation mismatch between inputs")]
    OrientationMismatch,
    #[error("sample moments are degenerate, the data have no usable spread")]
    DegenerateMoments,
    #[error("likelihood search ended outside the admissible parameter region")]
    FitFailed,
    #[error("seasonal standard deviation is not positive")]
    DegenerateSeason,
    #[error("bootstrap block length {b} exceeds the {n} resampled years")]
    BootstrapBlockTooLong { b: usize, n: usize },
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
