use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{DomainError, KnowledgeBase, Schema};

/// Hidden target of a simulated user.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserGoal {
    /// Constraints the user holds.
    pub inform_slots: BTreeMap<String, String>,
    /// Slots whose values the user wants from the agent; always holds the deliverable.
    pub request_slots: BTreeSet<String>,
}

impl UserGoal {
    pub fn validate(&self, schema: &Schema) -> Result<(), DomainError> {
        let bad = |m: String| Err(DomainError::MalformedGoal(m));
        if self.inform_slots.is_empty() {
            return bad("no constraints".into());
        }
        for slot in self.inform_slots.keys() {
            if !schema.is_informable(slot) {
                return bad(format!("`{slot}` is not informable"));
            }
            if self.request_slots.contains(slot) {
                return bad(format!("`{slot}` both constrained and requested"));
            }
        }
        for slot in &self.request_slots {
            if !schema.is_requestable(slot) {
                return bad(format!("`{slot}` is not requestable"));
            }
        }
        if !self.request_slots.contains(schema.deliverable()) {
            return bad("deliverable not requested".into());
        }
        Ok(())
    }

    /// Constraints restricted to slots stored in knowledge-base records.
    pub fn record_constraints(&self, schema: &Schema) -> BTreeMap<String, String> {
        self.inform_slots
            .iter()
            .filter(|(k, _)| schema.is_record_slot(k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}

/// How much of a source record ends up in a goal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalProfile {
    /// Chance that a non-primary record slot becomes a constraint.
    pub constraint_prob: f64,
    /// Chance that an unconstrained record slot is requested.
    pub request_prob: f64,
}

impl Default for GoalProfile {
    fn default() -> Self {
        GoalProfile { constraint_prob: 0.3, request_prob: 0.6 }
    }
}

/// Samples a goal from a uniformly chosen record; returns the goal and the record id.
///
/// The primary slot (`moviename`) and every booking parameter are always constrained,
/// and the deliverable is always requested, so the source record satisfies the goal.
pub fn sample_goal_with_source<R: Rng + ?Sized>(
    kb: &KnowledgeBase,
    schema: &Schema,
    profile: &GoalProfile,
    rng: &mut R,
) -> Result<(UserGoal, u32), DomainError> {
    let record = kb
        .records()
        .choose(rng)
        .ok_or_else(|| DomainError::KnowledgeBase("cannot sample a goal from an empty knowledge base".into()))?;
    let primary = schema.primary_slot();
    let mut inform_slots = BTreeMap::new();
    let mut request_slots = BTreeSet::new();
    for slot in schema.record_slots() {
        let value = record.get(slot).expect("record carries every record slot");
        if slot == primary || rng.gen_bool(profile.constraint_prob) {
            inform_slots.insert(slot.to_string(), value.to_string());
        } else if rng.gen_bool(profile.request_prob) {
            request_slots.insert(slot.to_string());
        }
    }
    for slot in schema.parameter_slots() {
        let value = kb.vocabulary(slot).choose(rng).expect("parameter pool is non-empty");
        inform_slots.insert(slot.to_string(), value.clone());
    }
    request_slots.insert(schema.deliverable().to_string());
    Ok((UserGoal { inform_slots, request_slots }, record.id))
}

pub fn sample_goal<R: Rng + ?Sized>(
    kb: &KnowledgeBase,
    schema: &Schema,
    profile: &GoalProfile,
    rng: &mut R,
) -> Result<UserGoal, DomainError> {
    sample_goal_with_source(kb, schema, profile, rng).map(|(goal, _)| goal)
}
