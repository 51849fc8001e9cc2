use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{BaseIntent, DomainError, FineIntent, Schema};

/// Value meaning "no preference"; never acts as a search constraint.
pub const ANYTHING: &str = "anything";

pub fn is_wildcard(value: &str) -> bool {
    value.eq_ignore_ascii_case(ANYTHING)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Speaker {
    User,
    Agent,
}

impl fmt::Display for Speaker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Speaker::User => "user",
            Speaker::Agent => "agent",
        })
    }
}

/// Semantic frame exchanged between user and agent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogueAct {
    pub speaker: Speaker,
    pub intent: FineIntent,
    pub inform_slots: BTreeMap<String, String>,
    pub request_slots: BTreeSet<String>,
}

impl DialogueAct {
    pub fn new(speaker: Speaker, intent: FineIntent) -> Self {
        DialogueAct { speaker, intent, inform_slots: BTreeMap::new(), request_slots: BTreeSet::new() }
    }

    pub fn bare(speaker: Speaker, base: BaseIntent) -> Self {
        DialogueAct::new(speaker, FineIntent::from(base))
    }

    pub fn inform(speaker: Speaker, slot: &str, value: &str) -> Self {
        DialogueAct::new(speaker, FineIntent::inform(slot)).with_inform(slot, value)
    }

    pub fn request(speaker: Speaker, slot: &str) -> Self {
        DialogueAct::new(speaker, FineIntent::request(slot)).with_request(slot)
    }

    pub fn with_inform(mut self, slot: &str, value: &str) -> Self {
        self.inform_slots.insert(slot.to_string(), value.to_string());
        self
    }

    pub fn with_request(mut self, slot: &str) -> Self {
        self.request_slots.insert(slot.to_string());
        self
    }

    pub fn base(&self) -> BaseIntent {
        self.intent.base()
    }

    /// An agent booking: an inform carrying the deliverable slot.
    pub fn is_booking(&self, schema: &Schema) -> bool {
        self.speaker == Speaker::Agent
            && self.base() == BaseIntent::Inform
            && self.inform_slots.contains_key(schema.deliverable())
    }

    /// Full well-formedness check.
    pub fn validate(&self, schema: &Schema) -> Result<(), DomainError> {
        self.validate_structure(schema)?;
        if self.base() == BaseIntent::Inform && self.inform_slots.is_empty() {
            return Err(DomainError::MalformedAct(format!("{self}: inform without slots")));
        }
        Ok(())
    }

    /// Well-formedness minus the non-empty-inform rule. Slot deletion can legitimately
    /// leave an inform frame with nothing recognized in it.
    pub fn validate_structure(&self, schema: &Schema) -> Result<(), DomainError> {
        let bad = |msg: String| Err(DomainError::MalformedAct(format!("{self}: {msg}")));
        if !self.intent.is_well_formed() {
            return bad("anchor present iff inform/request".into());
        }
        if let Some(anchor) = self.intent.anchor() {
            let known = match self.base() {
                BaseIntent::Inform => {
                    schema.is_informable(anchor) || (self.is_booking(schema) && anchor == schema.deliverable())
                }
                _ => schema.is_requestable(anchor),
            };
            if !known {
                return bad(format!("anchor `{anchor}` not valid for {}", self.base()));
            }
        }
        let booking = self.is_booking(schema);
        for key in self.inform_slots.keys() {
            if !schema.is_informable(key) && !(booking && key == schema.deliverable()) {
                return bad(format!("`{key}` is not informable"));
            }
        }
        for key in &self.request_slots {
            if !schema.is_requestable(key) {
                return bad(format!("`{key}` is not requestable"));
            }
        }
        if self.base() == BaseIntent::Request && self.request_slots.is_empty() {
            return bad("request without requested slots".into());
        }
        Ok(())
    }

    /// `k=v;k=v` rendering used by trace logs.
    pub fn inform_field(&self) -> String {
        self.inform_slots.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }

    pub fn request_field(&self) -> String {
        self.request_slots.iter().cloned().collect::<Vec<_>>().join(";")
    }
}

impl fmt::Display for DialogueAct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}({}", self.speaker, self.intent, self.inform_field())?;
        if !self.request_slots.is_empty() {
            write!(f, "; ?{}", self.request_field())?;
        }
        write!(f, ")")
    }
}
