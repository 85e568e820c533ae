use serde::{Deserialize, Serialize};

use crate::model::{IntermediateKind, Modality, RewardParams, Scenario, DEFAULT_TIE_TOLERANCE};

use super::{from_json, ScenarioIoError};

pub const SCHEMA_VERSION: &str = "1";

/// Versioned scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub schema_version: String,
    #[serde(default)]
    pub metadata: Metadata,
    pub scenario: ScenarioFields,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFields {
    pub horizon: usize,
    pub m: usize,
    pub n: usize,
    pub actions: Vec<Modality>,
    pub reward: RewardFields,
    #[serde(default)]
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardFields {
    pub c_phi: f64,
    pub c_tau: f64,
    pub d_phi: f64,
    pub d_tau: f64,
    #[serde(default)]
    pub intermediate: IntermediateFields,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntermediateFields {
    #[serde(default)]
    pub kind: IntermediateKind,
    #[serde(default)]
    pub c_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default = "default_tie_tolerance")]
    pub tie_tolerance: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tie_tolerance: DEFAULT_TIE_TOLERANCE,
        }
    }
}

fn default_tie_tolerance() -> f64 {
    DEFAULT_TIE_TOLERANCE
}

impl ScenarioDocument {
    pub fn new(scenario: &Scenario, name: &str, description: &str) -> Self {
        let r = &scenario.reward;
        ScenarioDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            metadata: Metadata {
                name: name.to_string(),
                description: description.to_string(),
            },
            scenario: ScenarioFields {
                horizon: scenario.horizon,
                m: scenario.m,
                n: scenario.n,
                actions: scenario.actions.clone(),
                reward: RewardFields {
                    c_phi: r.c_phi,
                    c_tau: r.c_tau,
                    d_phi: r.d_phi,
                    d_tau: r.d_tau,
                    intermediate: IntermediateFields {
                        kind: r.intermediate,
                        c_m: r.c_m,
                    },
                },
                options: Options {
                    tie_tolerance: scenario.tie_tolerance,
                },
            },
        }
    }

    /// The described scenario, unvalidated.
    pub fn to_scenario_unchecked(&self) -> Scenario {
        let f = &self.scenario;
        Scenario {
            horizon: f.horizon,
            m: f.m,
            n: f.n,
            actions: f.actions.clone(),
            reward: RewardParams {
                c_phi: f.reward.c_phi,
                c_tau: f.reward.c_tau,
                d_phi: f.reward.d_phi,
                d_tau: f.reward.d_tau,
                intermediate: f.reward.intermediate.kind,
                c_m: f.reward.intermediate.c_m,
            },
            tie_tolerance: f.options.tie_tolerance,
        }
    }

    pub fn check_schema_version(&self) -> Result<(), ScenarioIoError> {
        if self.schema_version == SCHEMA_VERSION {
            return Ok(());
        }
        Err(ScenarioIoError::at(
            "/schema_version",
            format!("unsupported schema version {:?}, expected {SCHEMA_VERSION:?}", self.schema_version),
        ))
    }

    /// The described scenario, validated.
    pub fn to_scenario(&self) -> Result<Scenario, ScenarioIoError> {
        let scenario = self.to_scenario_unchecked();
        scenario.validate()?;
        Ok(scenario)
    }
}

/// Parses a document and checks its schema version, without validating the
/// model.
pub fn parse_scenario_document(text: &str) -> Result<ScenarioDocument, ScenarioIoError> {
    let doc: ScenarioDocument = from_json(text)?;
    doc.check_schema_version()?;
    Ok(doc)
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioIoError> {
    parse_scenario_document(text)?.to_scenario()
}

/// Canonical pretty-printed form, newline terminated.
pub fn serialize_scenario_document(doc: &ScenarioDocument) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("documents always serialize");
    out.push('\n');
    out
}
