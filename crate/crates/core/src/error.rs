use thiserror::Error;

pub type Result<T> = std::result::Result<T, NsitError>;

#[derive(Debug, Error)]
pub enum NsitError {
    #[error("invalid dimension {0}: N must be at least 2")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NonHermitian(f64),

    #[error("matrix does not have unit trace (trace = {0})")]
    NotUnitTrace(f64),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("probability tuple {tuple} sums to {sum}, outside tolerance")]
    InconsistentTuples { tuple: usize, sum: f64 },

    #[error("Bloch vector with squared norm {0} is not a valid quantum state")]
    InvalidQuantumState(f64),

    #[error("{what} index {index} out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("conditioning on axis {axis} outcome {outcome:+} leaves no samples")]
    EmptyConditional { axis: char, outcome: i8 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("unknown distribution `{0}`")]
    UnknownDistribution(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("sampler misconfigured: {0}")]
    SamplerMisconfigured(String),

    #[error("training data contains a single class")]
    SingleClass,

    #[error("schema mismatch: expected `{expected}`, found `{found}`")]
    SchemaMismatch { expected: String, found: String },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl NsitError {
    /// True for errors caused by bad caller input rather than a failure
    /// during computation or I/O.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            NsitError::Internal(_) | NsitError::Io(_) | NsitError::SamplerMisconfigured(_)
        )
    }
}
