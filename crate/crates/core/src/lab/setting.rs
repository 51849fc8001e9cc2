use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::LabError;
use crate::error_model::ErrorConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgentKind {
    Rule,
    Dqn,
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AgentKind::Rule => "rule",
            AgentKind::Dqn => "dqn",
        })
    }
}

impl FromStr for AgentKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rule" => Ok(AgentKind::Rule),
            "dqn" => Ok(AgentKind::Dqn),
            other => Err(LabError::UnknownSetting(format!("agent `{other}`"))),
        }
    }
}

/// Named error grid: `(name, intent type, intent rate, slot type, slot rate)`.
pub const PRESETS: [(&str, u8, f64, u8, f64); 16] = [
    ("B1", 0, 0.00, 0, 0.00),
    ("B2", 0, 0.10, 0, 0.10),
    ("B3", 0, 0.20, 0, 0.20),
    ("I0", 0, 0.10, 0, 0.05),
    ("I1", 1, 0.10, 0, 0.05),
    ("I2", 2, 0.10, 0, 0.05),
    ("I3", 0, 0.00, 0, 0.05),
    ("I4", 0, 0.10, 0, 0.05),
    ("I5", 0, 0.20, 0, 0.05),
    ("S0", 0, 0.10, 0, 0.10),
    ("S1", 0, 0.10, 1, 0.10),
    ("S2", 0, 0.10, 2, 0.10),
    ("S3", 0, 0.10, 3, 0.10),
    ("S4", 0, 0.10, 0, 0.00),
    ("S5", 0, 0.10, 0, 0.10),
    ("S6", 0, 0.10, 0, 0.20),
];

pub fn preset(name: &str) -> Option<ErrorConfig> {
    PRESETS
        .iter()
        .find(|p| p.0.eq_ignore_ascii_case(name))
        .map(|&(_, it, ir, st, sr)| ErrorConfig::new(it, ir, st, sr).expect("preset values are valid"))
}

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|p| p.0)
}

/// One cell of the experiment grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSetting {
    pub name: String,
    pub error: ErrorConfig,
    pub agent: AgentKind,
}

impl ExperimentSetting {
    pub fn preset(name: &str, agent: AgentKind) -> Result<Self, LabError> {
        let error = preset(name).ok_or_else(|| LabError::UnknownSetting(name.to_string()))?;
        let canonical = PRESETS.iter().find(|p| p.0.eq_ignore_ascii_case(name)).expect("found above").0;
        Ok(ExperimentSetting { name: canonical.to_string(), error, agent })
    }

    pub fn custom(name: impl Into<String>, error: ErrorConfig, agent: AgentKind) -> Self {
        ExperimentSetting { name: name.into(), error, agent }
    }

    pub fn all_presets(agent: AgentKind) -> Vec<Self> {
        preset_names().map(|n| ExperimentSetting::preset(n, agent).expect("known preset")).collect()
    }
}
