//! Noisy channel between the simulated user and the agent.
//!
//! Intent errors replace the act's fine intent (within its group, across groups, or
//! either at random); slot errors hit each inform pair independently (deletion,
//! wrong value, wrong slot, or a random one of the three). The user always hears
//! the agent exactly; only user acts pass through here.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{BaseIntent, DialogueAct, FineIntent, IntentGroup, KnowledgeBase, Schema, Speaker};

/// Suffix appended to a value when a wrong-value error has no alternative to draw from.
pub const CORRUPTION_MARKER: &str = "~misheard";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntentErrorType {
    Random = 0,
    WithinGroup = 1,
    BetweenGroup = 2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SlotErrorType {
    Random = 0,
    Deletion = 1,
    Value = 2,
    Slot = 3,
}

impl IntentErrorType {
    pub fn from_code(code: u8) -> Result<Self, ConfigError> {
        match code {
            0 => Ok(IntentErrorType::Random),
            1 => Ok(IntentErrorType::WithinGroup),
            2 => Ok(IntentErrorType::BetweenGroup),
            other => Err(ConfigError::IntentType(other)),
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }
}

impl SlotErrorType {
    pub fn from_code(code: u8) -> Result<Self, ConfigError> {
        match code {
            0 => Ok(SlotErrorType::Random),
            1 => Ok(SlotErrorType::Deletion),
            2 => Ok(SlotErrorType::Value),
            3 => Ok(SlotErrorType::Slot),
            other => Err(ConfigError::SlotType(other)),
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("intent error type must be 0, 1 or 2, got {0}")]
    IntentType(u8),
    #[error("slot error type must be 0, 1, 2 or 3, got {0}")]
    SlotType(u8),
    #[error("{name} must lie in [0, 1], got {value}")]
    Rate { name: &'static str, value: f64 },
}

/// The four error knobs of one experimental setting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorConfig {
    pub intent_type: IntentErrorType,
    pub intent_rate: f64,
    pub slot_type: SlotErrorType,
    pub slot_rate: f64,
}

impl ErrorConfig {
    pub fn new(intent_type: u8, intent_rate: f64, slot_type: u8, slot_rate: f64) -> Result<Self, ConfigError> {
        for (name, value) in [("intent_rate", intent_rate), ("slot_rate", slot_rate)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::Rate { name, value });
            }
        }
        Ok(ErrorConfig {
            intent_type: IntentErrorType::from_code(intent_type)?,
            intent_rate,
            slot_type: SlotErrorType::from_code(slot_type)?,
            slot_rate,
        })
    }

    pub fn noiseless() -> Self {
        ErrorConfig {
            intent_type: IntentErrorType::Random,
            intent_rate: 0.0,
            slot_type: SlotErrorType::Random,
            slot_rate: 0.0,
        }
    }
}

impl fmt::Display for ErrorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "intent {}/{:.2} slot {}/{:.2}",
            self.intent_type.code(),
            self.intent_rate,
            self.slot_type.code(),
            self.slot_rate
        )
    }
}

/// What the channel did to one act.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorruptionRecord {
    pub intent_corrupted: bool,
    /// Inform pairs of the original act that were hit by a slot error.
    pub slots_corrupted: usize,
    /// Wrong-slot errors that landed on a key already present and overwrote it.
    pub overwrites: usize,
    pub original: DialogueAct,
}

impl CorruptionRecord {
    pub fn is_clean(&self) -> bool {
        !self.intent_corrupted && self.slots_corrupted == 0
    }
}

/// Passes one user act through the channel.
///
/// Slot errors are drawn first, independently per inform pair of the original act;
/// then, with probability `intent_rate`, the intent is replaced and the frame rewritten
/// to fit it. With both rates at zero the act comes back unchanged.
pub fn corrupt_act<R: Rng + ?Sized>(
    act: &DialogueAct,
    cfg: &ErrorConfig,
    schema: &Schema,
    kb: &KnowledgeBase,
    rng: &mut R,
) -> (DialogueAct, CorruptionRecord) {
    assert_eq!(act.speaker, Speaker::User, "only user acts are corrupted");
    let mut out = act.clone();
    let mut record = CorruptionRecord { intent_corrupted: false, slots_corrupted: 0, overwrites: 0, original: act.clone() };

    if cfg.slot_rate > 0.0 && !act.inform_slots.is_empty() {
        let mut kept: BTreeMap<String, String> = BTreeMap::new();
        let mut replaced: Vec<(String, String)> = Vec::new();
        for (slot, value) in &act.inform_slots {
            if rng.gen_bool(cfg.slot_rate) {
                record.slots_corrupted += 1;
                if let Some(pair) = corrupt_slot_pair(slot, value, cfg.slot_type, schema, kb, rng) {
                    replaced.push(pair);
                }
            } else {
                kept.insert(slot.clone(), value.clone());
            }
        }
        for (slot, value) in replaced {
            if kept.insert(slot, value).is_some() {
                record.overwrites += 1;
            }
        }
        out.inform_slots = kept;
    }

    if cfg.intent_rate > 0.0 && rng.gen_bool(cfg.intent_rate) {
        let new_intent = corrupt_intent(&act.intent, cfg.intent_type, schema, rng);
        out = realize_intent_change(&out, new_intent, kb, rng);
        record.intent_corrupted = true;
    }
    (out, record)
}

/// Draws a different fine intent according to the error type.
pub fn corrupt_intent<R: Rng + ?Sized>(
    intent: &FineIntent,
    mode: IntentErrorType,
    schema: &Schema,
    rng: &mut R,
) -> FineIntent {
    let within = match mode {
        IntentErrorType::WithinGroup => true,
        IntentErrorType::BetweenGroup => false,
        IntentErrorType::Random => rng.gen_bool(0.5),
    };
    let group = intent.group();
    let candidates: Vec<FineIntent> = if within {
        schema.fine_intents(group).into_iter().filter(|c| c != intent).collect()
    } else {
        [IntentGroup::General, IntentGroup::Inform, IntentGroup::Request]
            .into_iter()
            .filter(|g| *g != group)
            .flat_map(|g| schema.fine_intents(g))
            .collect()
    };
    candidates.choose(rng).cloned().unwrap_or_else(|| intent.clone())
}

/// Applies one slot error to an inform pair; `None` means the pair was dropped.
pub fn corrupt_slot_pair<R: Rng + ?Sized>(
    slot: &str,
    value: &str,
    mode: SlotErrorType,
    schema: &Schema,
    kb: &KnowledgeBase,
    rng: &mut R,
) -> Option<(String, String)> {
    let mode = match mode {
        SlotErrorType::Random => [SlotErrorType::Deletion, SlotErrorType::Value, SlotErrorType::Slot]
            .choose(rng)
            .copied()
            .expect("non-empty"),
        other => other,
    };
    match mode {
        SlotErrorType::Deletion | SlotErrorType::Random => None,
        SlotErrorType::Value => {
            let alternatives: Vec<&String> = kb.vocabulary(slot).iter().filter(|v| v.as_str() != value).collect();
            let wrong = match alternatives.choose(rng) {
                Some(v) => (*v).clone(),
                None => format!("{value}{CORRUPTION_MARKER}"),
            };
            Some((slot.to_string(), wrong))
        }
        SlotErrorType::Slot => {
            let others: Vec<&str> = schema.informable().filter(|s| *s != slot).collect();
            let Some(&other) = others.choose(rng) else {
                return None;
            };
            let value = kb
                .vocabulary(other)
                .choose(rng)
                .cloned()
                .unwrap_or_else(|| format!("{value}{CORRUPTION_MARKER}"));
            Some((other.to_string(), value))
        }
    }
}

/// Rewrites a frame so it is well formed under a new intent. Only the old and new
/// anchors are touched; every other pair and requested slot is preserved, except that
/// acts moved into the general group carry no slots at all.
pub fn realize_intent_change<R: Rng + ?Sized>(
    act: &DialogueAct,
    new_intent: FineIntent,
    kb: &KnowledgeBase,
    rng: &mut R,
) -> DialogueAct {
    let mut out = act.clone();
    let old_anchor = act.intent.anchor().map(str::to_string);
    match new_intent.base() {
        BaseIntent::Inform => {
            let slot = new_intent.anchor().expect("inform has an anchor").to_string();
            match (act.base(), &old_anchor) {
                (BaseIntent::Request, Some(old)) => {
                    out.request_slots.remove(old);
                }
                // The recognized value belonged to the old anchor; it moves away with it.
                (BaseIntent::Inform, Some(old)) if *old != slot => {
                    out.inform_slots.remove(old);
                }
                _ => {}
            }
            out.request_slots.remove(&slot);
            if !out.inform_slots.contains_key(&slot) {
                let value = fabricate(&slot, kb, rng);
                out.inform_slots.insert(slot, value);
            }
        }
        BaseIntent::Request => {
            let slot = new_intent.anchor().expect("request has an anchor").to_string();
            match act.base() {
                BaseIntent::Inform => {
                    if let Some(old) = &old_anchor {
                        out.inform_slots.remove(old);
                    }
                    out.inform_slots.remove(&slot);
                }
                BaseIntent::Request => {
                    if let Some(old) = &old_anchor {
                        out.request_slots.remove(old);
                    }
                }
                _ => {}
            }
            out.request_slots.insert(slot);
        }
        _ => {
            out.inform_slots.clear();
            out.request_slots.clear();
        }
    }
    out.intent = new_intent;
    out
}

fn fabricate<R: Rng + ?Sized>(slot: &str, kb: &KnowledgeBase, rng: &mut R) -> String {
    kb.vocabulary(slot)
        .choose(rng)
        .cloned()
        .unwrap_or_else(|| format!("{slot}{CORRUPTION_MARKER}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn setup() -> (Schema, KnowledgeBase) {
        let schema = Schema::movie();
        let kb = KnowledgeBase::synthesize(&schema, 7, 100).unwrap();
        (schema, kb)
    }

    fn user_inform(pairs: &[(&str, &str)]) -> DialogueAct {
        let mut act = DialogueAct::new(Speaker::User, FineIntent::inform(pairs[0].0));
        for (k, v) in pairs {
            act = act.with_inform(k, v);
        }
        act
    }

    #[test]
    fn rejects_out_of_range_config() {
        assert!(ErrorConfig::new(3, 0.1, 0, 0.1).is_err());
        assert!(ErrorConfig::new(0, 0.1, 4, 0.1).is_err());
        assert!(ErrorConfig::new(0, 1.1, 0, 0.1).is_err());
        assert!(ErrorConfig::new(0, 0.1, 0, -0.1).is_err());
        assert!(ErrorConfig::new(2, 1.0, 3, 0.0).is_ok());
    }

    #[test]
    fn zero_rates_are_identity() {
        let (schema, kb) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let act = user_inform(&[("moviename", "Titanic"), ("starttime", "7pm")]).with_request("ticket");
        let (out, record) = corrupt_act(&act, &ErrorConfig::noiseless(), &schema, &kb, &mut rng);
        assert_eq!(out, act);
        assert!(record.is_clean());
        assert_eq!(record.overwrites, 0);
    }

    #[test]
    fn deletion_drops_the_pair() {
        let (schema, kb) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(corrupt_slot_pair("starttime", "7pm", SlotErrorType::Deletion, &schema, &kb, &mut rng), None);
    }

    #[test]
    fn wrong_value_keeps_the_slot() {
        let (schema, kb) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..200 {
            let (slot, value) =
                corrupt_slot_pair("moviename", "Titanic", SlotErrorType::Value, &schema, &kb, &mut rng).unwrap();
            assert_eq!(slot, "moviename");
            assert_ne!(value, "Titanic");
            assert!(kb.vocabulary("moviename").contains(&value));
        }
    }

    #[test]
    fn wrong_value_without_alternatives_uses_marker() {
        let schema = Schema::movie();
        let kb = KnowledgeBase::synthesize(&schema, 7, 1).unwrap();
        let only = kb.vocabulary("city")[0].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (_, value) = corrupt_slot_pair("city", &only, SlotErrorType::Value, &schema, &kb, &mut rng).unwrap();
        assert_eq!(value, format!("{only}{CORRUPTION_MARKER}"));
    }

    #[test]
    fn wrong_slot_changes_the_name() {
        let (schema, kb) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut seen = BTreeSet::new();
        for _ in 0..500 {
            let (slot, value) =
                corrupt_slot_pair("moviename", "Titanic", SlotErrorType::Slot, &schema, &kb, &mut rng).unwrap();
            assert_ne!(slot, "moviename");
            assert!(schema.is_informable(&slot));
            assert!(kb.vocabulary(&slot).contains(&value));
            seen.insert(slot);
        }
        assert_eq!(seen.len(), schema.n_informable() - 1);
    }

    #[test]
    fn within_group_request_stays_a_request() {
        let (schema, _) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let original = FineIntent::request("theater");
        let mut outputs = BTreeSet::new();
        for _ in 0..500 {
            let out = corrupt_intent(&original, IntentErrorType::WithinGroup, &schema, &mut rng);
            assert_eq!(out.group(), IntentGroup::Request);
            assert_ne!(out, original);
            outputs.insert(out.to_string());
        }
        assert!(outputs.contains("request_moviename"));
    }

    #[test]
    fn between_group_leaves_the_group() {
        let (schema, _) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let original = FineIntent::request("moviename");
        let mut outputs = BTreeSet::new();
        for _ in 0..500 {
            let out = corrupt_intent(&original, IntentErrorType::BetweenGroup, &schema, &mut rng);
            assert_ne!(out.group(), IntentGroup::Request);
            outputs.insert(out.to_string());
        }
        assert!(outputs.contains("inform_moviename"));
        assert!(outputs.contains("greeting"));
    }

    #[test]
    fn random_intent_error_mixes_both_kinds() {
        let (schema, _) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let original = FineIntent::inform("theater");
        let same = (0..2000)
            .filter(|_| corrupt_intent(&original, IntentErrorType::Random, &schema, &mut rng).group() == IntentGroup::Inform)
            .count();
        // fair coin: 1000 expected, sd ~22
        assert!((900..1100).contains(&same), "{same}");
    }

    #[test]
    fn request_to_inform_fabricates_a_vocabulary_value() {
        let (schema, kb) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let act = DialogueAct::request(Speaker::User, "starttime");
        let out = realize_intent_change(&act, FineIntent::inform("starttime"), &kb, &mut rng);
        assert!(out.request_slots.is_empty());
        assert!(kb.vocabulary("starttime").contains(&out.inform_slots["starttime"]));
        out.validate(&schema).unwrap();
    }

    #[test]
    fn inform_to_request_drops_the_value() {
        let (schema, kb) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let act = user_inform(&[("moviename", "Titanic")]);
        let out = realize_intent_change(&act, FineIntent::request("moviename"), &kb, &mut rng);
        assert!(out.inform_slots.is_empty());
        assert!(out.request_slots.contains("moviename"));
        out.validate(&schema).unwrap();
    }

    #[test]
    fn moving_into_general_clears_slots() {
        let (_, kb) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let act = user_inform(&[("moviename", "Titanic"), ("city", "seattle")]).with_request("ticket");
        let out = realize_intent_change(&act, BaseIntent::Greeting.into(), &kb, &mut rng);
        assert!(out.inform_slots.is_empty() && out.request_slots.is_empty());
    }

    #[test]
    fn mode_three_collision_overwrites() {
        let schema = Schema::parse("intent inform\nintent request\nslot a both\nslot b both\nslot t requestable\n").unwrap();
        let kb = KnowledgeBase::synthesize(&schema, 1, 10).unwrap();
        let cfg = ErrorConfig::new(0, 0.0, 3, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = kb.vocabulary("a")[0].clone();
        let b = kb.vocabulary("b")[0].clone();
        let act = DialogueAct::new(Speaker::User, FineIntent::inform("a")).with_inform("a", &a).with_inform("b", &b);
        let (out, record) = corrupt_act(&act, &cfg, &schema, &kb, &mut rng);
        assert_eq!(record.slots_corrupted, 2);
        // a -> b and b -> a: both land on keys that were removed, no overwrite
        assert_eq!(out.inform_slots.len(), 2);
        assert_eq!(record.overwrites, 0);

        let cfg = ErrorConfig::new(0, 0.0, 3, 0.5).unwrap();
        let mut overwrites = 0;
        for _ in 0..200 {
            let (out, record) = corrupt_act(&act, &cfg, &schema, &kb, &mut rng);
            if record.slots_corrupted == 1 {
                assert_eq!(out.inform_slots.len(), 1);
                overwrites += record.overwrites;
            }
        }
        assert!(overwrites > 0);
    }
}
