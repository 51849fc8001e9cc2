use crate::domain::{BaseIntent, Schema};

use super::DialogueState;

/// Match-count buckets: 0, 1, 2–4, 5+.
pub const KB_BUCKETS: usize = 4;

fn kb_bucket(count: usize) -> usize {
    match count {
        0 => 0,
        1 => 1,
        2..=4 => 2,
        _ => 3,
    }
}

/// Fixed-length feature encoding of a [`DialogueState`]. Every entry lies in `[0, 1]`.
///
/// Layout, in order: last user base intent (one-hot), slots informed by the last user
/// act, slots requested by the last user act, informable slots with a tracked value,
/// per requestable slot a requested-by-user bit and an answered-by-agent bit, last agent
/// action (one-hot, zeros before the first), match-count bucket (one-hot), turn fraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateEncoder {
    informable: Vec<String>,
    requestable: Vec<String>,
    n_actions: usize,
    max_turns: usize,
}

impl StateEncoder {
    pub fn new(schema: &Schema, n_actions: usize, max_turns: usize) -> Self {
        StateEncoder {
            informable: schema.informable().map(str::to_string).collect(),
            requestable: schema.requestable().map(str::to_string).collect(),
            n_actions,
            max_turns,
        }
    }

    pub fn dimension(&self) -> usize {
        let ni = self.informable.len();
        let nr = self.requestable.len();
        BaseIntent::ALL.len() + ni + nr + ni + 2 * nr + self.n_actions + KB_BUCKETS + 1
    }

    pub fn encode(&self, state: &DialogueState) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        self.encode_into(state, &mut out);
        out
    }

    pub fn encode_into(&self, state: &DialogueState, out: &mut [f64]) {
        assert_eq!(out.len(), self.dimension(), "state vector dimension");
        out.fill(0.0);
        let mut at = 0;
        if let Some(act) = state.last_user_act() {
            out[at + act.base().index()] = 1.0;
        }
        at += BaseIntent::ALL.len();
        for (i, slot) in self.informable.iter().enumerate() {
            if state.last_user_act().is_some_and(|a| a.inform_slots.contains_key(slot)) {
                out[at + i] = 1.0;
            }
        }
        at += self.informable.len();
        for (i, slot) in self.requestable.iter().enumerate() {
            if state.last_user_act().is_some_and(|a| a.request_slots.contains(slot)) {
                out[at + i] = 1.0;
            }
        }
        at += self.requestable.len();
        for (i, slot) in self.informable.iter().enumerate() {
            if state.constraints().contains_key(slot) {
                out[at + i] = 1.0;
            }
        }
        at += self.informable.len();
        for (i, slot) in self.requestable.iter().enumerate() {
            if state.user_requests().contains(slot) {
                out[at + 2 * i] = 1.0;
            }
            if state.answered().contains(slot) {
                out[at + 2 * i + 1] = 1.0;
            }
        }
        at += 2 * self.requestable.len();
        if let Some(a) = state.last_agent_action() {
            out[at + a] = 1.0;
        }
        at += self.n_actions;
        out[at + kb_bucket(state.kb_match_count())] = 1.0;
        at += KB_BUCKETS;
        out[at] = (state.turn() as f64 / self.max_turns as f64).min(1.0);
    }
}
