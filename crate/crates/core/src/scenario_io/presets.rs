use serde::Serialize;

use crate::model::{
    IncrementRow, IntermediateKind, Modality, ModalityKind, RewardParams, Scenario, DEFAULT_TIE_TOLERANCE,
};

use super::{ScenarioDocument, ScenarioIoError};

pub const PRESET_NAMES: [&str; 11] = [
    "base",
    "d15",
    "d3",
    "c33",
    "c67",
    "inter-phi",
    "inter-tau",
    "table2-m1-strong",
    "table3-m2-safe",
    "table4-m3-slow",
    "table5-four-actions",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
}

fn description(name: &str) -> Option<&'static str> {
    Some(match name {
        "base" => "Base kernels, quadratic utilities, equal weights, no intermediate reward",
        "d15" => "Base case with utility exponent d = 3/2",
        "d3" => "Base case with utility exponent d = 3",
        "c33" => "Base case weighting side effect 1/3 and tumor 2/3",
        "c67" => "Base case weighting side effect 2/3 and tumor 1/3",
        "inter-phi" => "Base case plus per-period side-effect reward, c_m = 1/4",
        "inter-tau" => "Base case plus per-period tumor reward, c_m = 1/4",
        "table2-m1-strong" => "Type 1 modality reduces tumor with probability 0.8",
        "table3-m2-safe" => "Type 2 modality raises side effect with probability 0.3",
        "table4-m3-slow" => "Surveillance lets the tumor grow with probability 0.3",
        "table5-four-actions" => "Two Type 2 modalities ordered by effectiveness",
        _ => return None,
    })
}

pub fn catalog() -> Vec<PresetInfo> {
    PRESET_NAMES
        .iter()
        .map(|&name| PresetInfo {
            name,
            description: description(name).expect("every preset is described"),
        })
        .collect()
}

const fn row(down: f64, stay: f64, up: f64) -> IncrementRow {
    IncrementRow::new(down, stay, up)
}

fn base_actions() -> Vec<Modality> {
    vec![
        Modality::new("M1", ModalityKind::Type1, row(0.0, 0.4, 0.6), row(0.7, 0.3, 0.0)),
        Modality::new("M2", ModalityKind::Type2, row(0.0, 0.6, 0.4), row(0.6, 0.4, 0.0)),
        Modality::new("M3", ModalityKind::Type3, row(0.6, 0.4, 0.0), row(0.0, 0.3, 0.7)),
    ]
}

fn base() -> Scenario {
    Scenario {
        horizon: 3,
        m: 10,
        n: 10,
        actions: base_actions(),
        reward: RewardParams::balanced(2.0),
        tie_tolerance: DEFAULT_TIE_TOLERANCE,
    }
}

/// One of the named scenarios, all with `T = 3` and `m = n = 10`.
pub fn preset(name: &str) -> Result<Scenario, ScenarioIoError> {
    let mut s = base();
    match name {
        "base" => {}
        "d15" => s.reward = RewardParams::balanced(1.5),
        "d3" => s.reward = RewardParams::balanced(3.0),
        "c33" => {
            s.reward.c_phi = 1.0 / 3.0;
            s.reward.c_tau = 2.0 / 3.0;
        }
        "c67" => {
            s.reward.c_phi = 2.0 / 3.0;
            s.reward.c_tau = 1.0 / 3.0;
        }
        "inter-phi" => {
            s.reward.intermediate = IntermediateKind::SideEffect;
            s.reward.c_m = 0.25;
        }
        "inter-tau" => {
            s.reward.intermediate = IntermediateKind::Tumor;
            s.reward.c_m = 0.25;
        }
        "table2-m1-strong" => s.actions[0].tau_row = row(0.8, 0.2, 0.0),
        "table3-m2-safe" => s.actions[1].phi_row = row(0.0, 0.7, 0.3),
        "table4-m3-slow" => s.actions[2].tau_row = row(0.0, 0.7, 0.3),
        "table5-four-actions" => {
            s.actions = vec![
                Modality::new("M1", ModalityKind::Type1, row(0.0, 0.4, 0.6), row(0.7, 0.3, 0.0)),
                Modality::new("M2a", ModalityKind::Type2, row(0.0, 0.5, 0.5), row(0.6, 0.4, 0.0)),
                Modality::new("M2b", ModalityKind::Type2, row(0.0, 0.6, 0.4), row(0.5, 0.5, 0.0)),
                Modality::new("M3", ModalityKind::Type3, row(0.6, 0.4, 0.0), row(0.0, 0.3, 0.7)),
            ]
        }
        _ => return Err(ScenarioIoError::UnknownPreset(name.to_string())),
    }
    Ok(s)
}

pub fn preset_document(name: &str) -> Result<ScenarioDocument, ScenarioIoError> {
    let scenario = preset(name)?;
    Ok(ScenarioDocument::new(&scenario, name, description(name).unwrap_or_default()))
}
