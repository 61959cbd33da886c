use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("prediction for `{product}` has {got} entries but the product has {expected} instances")]
    Alignment {
        product: String,
        expected: usize,
        got: usize,
    },
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid dataset: {0}")]
    Dataset(String),
    #[error("treatment failed on feature `{feature}`: {reason}")]
    Treatment { feature: String, reason: String },
    #[error("learner failed: {0}")]
    Learner(String),
    #[error("planning failed: {0}")]
    Planning(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
