//! JSON scenario and solution documents, and the preset catalog.

mod document;
mod presets;
mod solution_doc;

use thiserror::Error;

use crate::error::ModelError;

pub use document::{
    parse_scenario, parse_scenario_document, serialize_scenario_document, Metadata, ScenarioDocument,
    SCHEMA_VERSION,
};
pub use presets::{catalog, preset, preset_document, PresetInfo, PRESET_NAMES};
pub use solution_doc::{parse_solution, serialize_solution, Number, SolutionDocument, SolutionEntry};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioIoError {
    #[error("{path}: {message} (line {line}, column {column})")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Validation(#[from] ModelError),

    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
}

impl ScenarioIoError {
    pub fn path(&self) -> Option<&str> {
        match self {
            ScenarioIoError::Parse { path, .. } => Some(path),
            ScenarioIoError::Validation(e) => e.path(),
            ScenarioIoError::UnknownPreset(_) => None,
        }
    }

    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        ScenarioIoError::Parse {
            path: path.into(),
            line: 0,
            column: 0,
            message: message.into(),
        }
    }
}

/// Deserializes `text`, reporting failures with a JSON-pointer path.
pub fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, ScenarioIoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let parsed: Result<T, _> = serde_path_to_error::deserialize(de);
    parsed.map_err(|err| {
        let mut path = String::new();
        for segment in err.path().iter() {
            use serde_path_to_error::Segment;
            match segment {
                Segment::Seq { index } => path.push_str(&format!("/{index}")),
                Segment::Map { key } => path.push_str(&format!("/{key}")),
                Segment::Enum { variant } => path.push_str(&format!("/{variant}")),
                Segment::Unknown => {}
            }
        }
        let inner = err.inner();
        let message = inner.to_string();
        // serde reports a missing field at its parent; point at the field itself.
        if let Some(field) = message
            .strip_prefix("missing field `")
            .and_then(|rest| rest.split('`').next())
        {
            path.push('/');
            path.push_str(field);
        }
        if path.is_empty() {
            path.push('/');
        }
        ScenarioIoError::Parse {
            path,
            line: inner.line(),
            column: inner.column(),
            message,
        }
    })
}
