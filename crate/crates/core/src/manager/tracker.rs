use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::domain::{BaseIntent, DialogueAct, KnowledgeBase, Schema, Speaker};

/// Deterministic frame-merging state tracker.
///
/// Everything here is built from what the agent heard (possibly corrupted user acts)
/// and what it said; it never sees the true goal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogueState {
    constraints: BTreeMap<String, String>,
    agent_requested: BTreeSet<String>,
    user_requests: BTreeSet<String>,
    answered: BTreeSet<String>,
    last_user_act: Option<DialogueAct>,
    last_agent_act: Option<DialogueAct>,
    last_agent_action: Option<usize>,
    kb_match_count: usize,
    offered_record: Option<u32>,
    turn: usize,
}

impl DialogueState {
    /// Fresh tracker: nothing known, every record still matches.
    pub fn new(kb: &KnowledgeBase) -> Self {
        DialogueState {
            constraints: BTreeMap::new(),
            agent_requested: BTreeSet::new(),
            user_requests: BTreeSet::new(),
            answered: BTreeSet::new(),
            last_user_act: None,
            last_agent_act: None,
            last_agent_action: None,
            kb_match_count: kb.len(),
            offered_record: None,
            turn: 0,
        }
    }

    /// Merges a heard user act: latest value wins per slot, requested slots are noted
    /// (and marked unanswered again), the match count is refreshed. Any change to the
    /// constraints makes earlier answers stale, so all answered marks are dropped.
    pub fn track_user(&mut self, act: &DialogueAct, kb: &KnowledgeBase) {
        assert_eq!(act.speaker, Speaker::User);
        let mut changed = false;
        for (slot, value) in &act.inform_slots {
            changed |= self.constraints.insert(slot.clone(), value.clone()).as_ref() != Some(value);
        }
        if changed {
            self.answered.clear();
        }
        for slot in &act.request_slots {
            self.user_requests.insert(slot.clone());
            self.answered.remove(slot);
        }
        self.kb_match_count = kb.count_matches(&self.constraints);
        self.last_user_act = Some(act.clone());
        self.turn += 1;
    }

    /// Records an agent act. A booking fixes the offered record to the lowest-id match.
    pub fn track_agent(&mut self, act: &DialogueAct, action: Option<usize>, schema: &Schema, kb: &KnowledgeBase) {
        assert_eq!(act.speaker, Speaker::Agent);
        self.agent_requested.extend(act.request_slots.iter().cloned());
        if act.is_booking(schema) {
            self.offered_record = kb.first_match(&self.constraints).map(|r| r.id);
            self.answered.insert(schema.deliverable().to_string());
        } else if act.base() == BaseIntent::Inform {
            self.answered.extend(act.inform_slots.keys().cloned());
        }
        self.last_agent_act = Some(act.clone());
        self.last_agent_action = action;
    }

    pub fn constraints(&self) -> &BTreeMap<String, String> {
        &self.constraints
    }

    pub fn agent_requested(&self) -> &BTreeSet<String> {
        &self.agent_requested
    }

    pub fn user_requests(&self) -> &BTreeSet<String> {
        &self.user_requests
    }

    /// Slots the agent has informed since the user last asked for them.
    pub fn answered(&self) -> &BTreeSet<String> {
        &self.answered
    }

    pub fn last_user_act(&self) -> Option<&DialogueAct> {
        self.last_user_act.as_ref()
    }

    pub fn last_agent_act(&self) -> Option<&DialogueAct> {
        self.last_agent_act.as_ref()
    }

    pub fn last_agent_action(&self) -> Option<usize> {
        self.last_agent_action
    }

    pub fn kb_match_count(&self) -> usize {
        self.kb_match_count
    }

    pub fn offered_record(&self) -> Option<u32> {
        self.offered_record
    }

    pub fn turn(&self) -> usize {
        self.turn
    }
}

pub fn reset_tracker(kb: &KnowledgeBase) -> DialogueState {
    DialogueState::new(kb)
}
