use thiserror::Error;

/// Errors raised by every module of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("feature `{0}` has no present value in the training data and cannot be scaled")]
    UnscalableFeature(String),

    /// The member's feature subset touches a missing feature of the instance.
    #[error("member unusable: feature {0} is missing")]
    MemberUnusable(usize),

    #[error("model not trained")]
    ModelNotTrained,

    #[error("training diverged at cycle {cycle}: non-finite loss")]
    Divergence { cycle: usize },

    #[error("no usable ensemble member for this instance")]
    NoUsableMember,

    #[error("training member with features {subset:?} failed: {source}")]
    MemberTraining {
        subset: Vec<usize>,
        #[source]
        source: Box<Error>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Process exit code for the category of this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) => 2,
            Error::UnscalableFeature(_) => 3,
            Error::MemberUnusable(_) | Error::NoUsableMember => 4,
            Error::ModelNotTrained => 5,
            Error::Divergence { .. } | Error::MemberTraining { .. } => 6,
            Error::Io(_) => 7,
            Error::Csv(_) | Error::Json(_) => 8,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
