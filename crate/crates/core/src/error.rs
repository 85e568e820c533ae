use thiserror::Error;

/// Errors raised while validating or evaluating a treatment model.
///
/// Field locations are JSON pointers into the scenario document
/// (`/scenario/actions/0/phi_row/2`), since the document mirrors the model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{path}: probabilities sum to {sum}, expected 1")]
    RowSum { path: String, sum: f64 },

    #[error("{path}: probability {value} is negative or not finite")]
    Sign { path: String, value: f64 },

    #[error("{path}: {reason}")]
    Structure { path: String, reason: String },

    #[error("out of domain: {0}")]
    Domain(String),

    #[error("empty action-value list")]
    Empty,
}

impl ModelError {
    /// Document path of the offending field, when the error names one.
    pub fn path(&self) -> Option<&str> {
        match self {
            ModelError::RowSum { path, .. }
            | ModelError::Sign { path, .. }
            | ModelError::Structure { path, .. } => Some(path),
            ModelError::Domain(_) | ModelError::Empty => None,
        }
    }

    pub(crate) fn structure(path: impl Into<String>, reason: impl Into<String>) -> Self {
        ModelError::Structure {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
