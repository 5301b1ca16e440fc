use std::path::PathBuf;

use persistence_core::tail::FitError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] persistence_core::Error),
    #[error("exponent fit failed: {0}")]
    Fit(#[from] FitError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error("insufficient data: {0}")]
    Insufficient(String),
    #[error("{failed} of {n_paths} paths failed numerically")]
    NumericFailures { failed: usize, n_paths: usize },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

pub type LabResult<T> = Result<T, LabError>;

pub(crate) fn io_error(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> LabError {
    let path = path.into();
    move |source| LabError::Io { path, source }
}

impl LabError {
    /// Process exit status: 2 for usage and configuration problems, 4 when
    /// the data cannot support a conclusion, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Config(_) => 2,
            Self::Core(e)
                if !matches!(
                    e,
                    persistence_core::Error::NonFinite(_) | persistence_core::Error::Quadrature { .. }
                ) =>
            {
                2
            }
            Self::Insufficient(_) | Self::Fit(_) => 4,
            _ => 1,
        }
    }
}
