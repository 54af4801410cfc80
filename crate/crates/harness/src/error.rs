use depthcore::DepthError;
use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Depth(#[from] DepthError),

    /// Bad command-line usage or unreadable inputs.
    #[error("{0}")]
    Input(String),

    /// A proven bound failed; the run is invalid.
    #[error("proven bound violated: {0}")]
    ProvenBound(String),

    /// The requested work exceeds the runtime budget.
    #[error("{0}")]
    Budget(String),
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Depth(DepthError::Io(e))
    }
}

impl HarnessError {
    /// 1 input, 2 proven-bound failure, 3 resource guard.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::ProvenBound(_) => 2,
            HarnessError::Budget(_) | HarnessError::Depth(DepthError::Sizing { .. }) => 3,
            _ => 1,
        }
    }
}
