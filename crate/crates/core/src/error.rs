use thiserror::Error;

pub type Result<T, E = DepthError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum DepthError {
    /// Malformed arguments: dimension mismatches, non-positive radii and the like.
    #[error("invalid input: {0}")]
    Input(String),

    /// A configuration document failed validation; `path` locates the field.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    /// A structure would exceed its configured memory cap.
    #[error("sizing error: {what} needs {needed}, cap is {cap}")]
    Sizing {
        what: &'static str,
        needed: u64,
        cap: u64,
    },

    /// A grid is too coarse for the requested radius.
    #[error("accuracy error: grid spacing {spacing} exceeds radius/10 for radius {radius}")]
    Accuracy { spacing: f64, radius: f64 },

    /// Scores were computed on a different graph than the one supplied.
    #[error("score vector does not belong to this graph: {0}")]
    Fingerprint(String),

    #[error("CSV parse error at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl DepthError {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        DepthError::Input(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        DepthError::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
