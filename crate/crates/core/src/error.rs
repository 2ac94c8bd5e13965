use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid partition spec: {0}")]
    InvalidPartition(String),

    #[error("invalid constraint model: {0}")]
    InvalidModel(String),

    /// A documented precondition (e.g. the radius window of the ball-containment check) does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The digit index required exceeds the supported index limit or `u64`.
    #[error("index overflow: {0}")]
    IndexOverflow(String),

    #[error("cover sum diverges at s = {s}")]
    Divergent { s: f64 },

    /// The Moran equation has no sign change on the search interval.
    #[error(
        "no root of the cover-sum equation on [{s_lo}, {s_hi}] (ln sums {ln_sum_lo}, {ln_sum_hi})"
    )]
    NoRoot {
        s_lo: f64,
        s_hi: f64,
        ln_sum_lo: f64,
        ln_sum_hi: f64,
    },

    #[error("cover sum is not monotone in s: {0}")]
    NonMonotone(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used in the CLI's JSON error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::InvalidPartition(_) => "invalid-partition",
            Error::InvalidModel(_) => "invalid-model",
            Error::Precondition(_) => "precondition",
            Error::IndexOverflow(_) => "index-overflow",
            Error::Divergent { .. } => "divergent",
            Error::NoRoot { .. } => "no-root",
            Error::NonMonotone(_) => "non-monotone",
            Error::Sampling(_) => "sampling",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
