use signed_iwasawa_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error("input error: {0}")]
    Input(String),
    #[error("computation failed: {0}")]
    Compute(String),
}

pub type Result<T> = std::result::Result<T, WorkbenchError>;

impl WorkbenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            WorkbenchError::Compute(_) => 1,
            WorkbenchError::Input(_) => 2,
        }
    }
}

impl From<CoreError> for WorkbenchError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidArgument(_) | CoreError::BadReduction { .. } | CoreError::UnsupportedHypothesis(_) => {
                WorkbenchError::Input(e.to_string())
            }
            _ => WorkbenchError::Compute(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for WorkbenchError {
    fn from(e: serde_json::Error) -> Self {
        WorkbenchError::Input(format!("malformed JSON: {e}"))
    }
}

pub fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(WorkbenchError::Input(msg.into()))
}
