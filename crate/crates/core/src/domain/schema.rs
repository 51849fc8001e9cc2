use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BaseIntent, DomainError, FineIntent, IntentGroup};

const DEFAULT_SCHEMA: &str = include_str!("../../data/movie.schema");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotSpec {
    pub name: String,
    pub informable: bool,
    pub requestable: bool,
}

impl SlotSpec {
    /// Slots that are both informable and requestable are stored in knowledge-base records.
    pub fn is_record_slot(&self) -> bool {
        self.informable && self.requestable
    }

    /// Informable-only slots (e.g. `numberofpeople`) are booking parameters the user
    /// always knows; no record carries them.
    pub fn is_parameter(&self) -> bool {
        self.informable && !self.requestable
    }
}

/// Slot and intent inventory of a domain.
///
/// Slot roles are derived from the flags: `both` slots live in the knowledge base,
/// informable-only slots are booking parameters, and the single requestable-only slot
/// is the deliverable every user goal asks for (the ticket).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    slots: Vec<SlotSpec>,
    intents: Vec<BaseIntent>,
    deliverable: String,
}

impl Schema {
    /// The built-in movie-booking schema.
    pub fn movie() -> Self {
        Schema::parse(DEFAULT_SCHEMA).expect("built-in schema is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DomainError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| DomainError::Io(format!("{}: {e}", path.display())))?;
        Schema::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, DomainError> {
        let mut slots: Vec<SlotSpec> = Vec::new();
        let mut intents: Vec<BaseIntent> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| DomainError::Schema { line: line_no, msg: msg.to_string() };
            match fields.as_slice() {
                ["slot", name, kind] => {
                    let (informable, requestable) = match *kind {
                        "informable" => (true, false),
                        "requestable" => (false, true),
                        "both" => (true, true),
                        other => return Err(bad(&format!("unknown slot kind `{other}`"))),
                    };
                    if slots.iter().any(|s| s.name == *name) {
                        return Err(bad(&format!("duplicate slot `{name}`")));
                    }
                    slots.push(SlotSpec { name: name.to_string(), informable, requestable });
                }
                ["intent", base] => {
                    let base: BaseIntent = base.parse().map_err(|_| bad(&format!("unknown intent `{base}`")))?;
                    if !intents.contains(&base) {
                        intents.push(base);
                    }
                }
                _ => return Err(bad("expected `slot <name> <kind>` or `intent <base>`")),
            }
        }
        Schema::from_parts(slots, intents)
    }

    pub fn from_parts(slots: Vec<SlotSpec>, mut intents: Vec<BaseIntent>) -> Result<Self, DomainError> {
        let invalid = |msg: &str| DomainError::Schema { line: 0, msg: msg.to_string() };
        for required in [BaseIntent::Inform, BaseIntent::Request] {
            if !intents.contains(&required) {
                return Err(invalid(&format!("intent `{required}` must be declared")));
            }
        }
        intents.sort();
        if !slots.iter().any(SlotSpec::is_record_slot) {
            return Err(invalid("at least one slot must be `both`"));
        }
        let deliverables: Vec<&SlotSpec> =
            slots.iter().filter(|s| s.requestable && !s.informable).collect();
        if deliverables.len() != 1 {
            return Err(invalid("exactly one requestable-only (deliverable) slot is required"));
        }
        let deliverable = deliverables[0].name.clone();
        Ok(Schema { slots, intents, deliverable })
    }

    pub fn slots(&self) -> &[SlotSpec] {
        &self.slots
    }

    pub fn intents(&self) -> &[BaseIntent] {
        &self.intents
    }

    pub fn slot(&self, name: &str) -> Option<&SlotSpec> {
        self.slots.iter().find(|s| s.name == name)
    }

    pub fn is_informable(&self, name: &str) -> bool {
        self.slot(name).is_some_and(|s| s.informable)
    }

    pub fn is_requestable(&self, name: &str) -> bool {
        self.slot(name).is_some_and(|s| s.requestable)
    }

    pub fn is_record_slot(&self, name: &str) -> bool {
        self.slot(name).is_some_and(SlotSpec::is_record_slot)
    }

    pub fn informable(&self) -> impl Iterator<Item = &str> {
        self.slots.iter().filter(|s| s.informable).map(|s| s.name.as_str())
    }

    pub fn requestable(&self) -> impl Iterator<Item = &str> {
        self.slots.iter().filter(|s| s.requestable).map(|s| s.name.as_str())
    }

    pub fn record_slots(&self) -> impl Iterator<Item = &str> {
        self.slots.iter().filter(|s| s.is_record_slot()).map(|s| s.name.as_str())
    }

    pub fn parameter_slots(&self) -> impl Iterator<Item = &str> {
        self.slots.iter().filter(|s| s.is_parameter()).map(|s| s.name.as_str())
    }

    pub fn n_informable(&self) -> usize {
        self.informable().count()
    }

    pub fn n_requestable(&self) -> usize {
        self.requestable().count()
    }

    /// The requestable-only slot answered by a booking (`ticket`).
    pub fn deliverable(&self) -> &str {
        &self.deliverable
    }

    /// The record slot every goal constrains and every first user turn discloses.
    pub fn primary_slot(&self) -> &str {
        self.record_slots().next().expect("validated at construction")
    }

    /// All fine intents of a group, in schema order.
    pub fn fine_intents(&self, group: IntentGroup) -> Vec<FineIntent> {
        match group {
            IntentGroup::General => self
                .intents
                .iter()
                .filter(|b| b.group() == IntentGroup::General)
                .map(|&b| FineIntent::from(b))
                .collect(),
            IntentGroup::Inform => self.informable().map(FineIntent::inform).collect(),
            IntentGroup::Request => self.requestable().map(FineIntent::request).collect(),
        }
    }
}

impl Default for Schema {
    fn default() -> Self {
        Schema::movie()
    }
}
