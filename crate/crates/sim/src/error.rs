use std::io;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] rbf_core::Error),
    #[error("need at least 2 samples for a confidence interval (got {0})")]
    InsufficientSamples(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl SimError {
    /// True for errors caused by bad input rather than a failed run.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            SimError::Model(rbf_core::Error::InvalidParameter(_))
                | SimError::Model(rbf_core::Error::Unsupported(_))
                | SimError::InvalidConfig(_)
                | SimError::Json(_)
        )
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
