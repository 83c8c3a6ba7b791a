use nfdb_core::{LocalDataError, MassError, QueryError, StoreError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("bad parameter {name:?}: {reason}")]
    BadParam { name: String, reason: String },
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Mass(#[from] MassError),
    #[error(transparent)]
    LocalData(#[from] LocalDataError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{0}")]
    Rejected(String),
}

impl ServiceError {
    pub fn param(name: &str, reason: impl Into<String>) -> Self {
        ServiceError::BadParam {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    /// True when the caller sent bad input rather than the server failing.
    pub fn is_client_error(&self) -> bool {
        !matches!(
            self,
            ServiceError::Store(StoreError::Io(_) | StoreError::Corrupt(_))
        )
    }
}
