//! Agenda-based simulated user.
//!
//! The user holds a hidden [`UserGoal`] and a LIFO agenda of pending acts. Each
//! agent act is answered by a fixed rule set; the session ends when the user says
//! `closing` or the turn budget runs out. The environment side ([`evaluate_outcome`],
//! [`reward`]) judges the finished dialogue against the true goal.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IteratorRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{BaseIntent, DialogueAct, FineIntent, KnowledgeBase, Schema, Speaker, UserGoal, ANYTHING};

pub const DEFAULT_MAX_TURNS: usize = 40;

/// Constraints the first user turn may reveal beyond the primary slot.
pub const MAX_EXTRA_DISCLOSED: usize = 2;

/// Stack of pending user acts; the top is the last element.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agenda {
    pending: Vec<DialogueAct>,
}

impl Agenda {
    pub fn push(&mut self, act: DialogueAct) {
        self.pending.push(act);
    }

    pub fn pop(&mut self) -> Option<DialogueAct> {
        self.pending.pop()
    }

    pub fn top(&self) -> Option<&DialogueAct> {
        self.pending.last()
    }

    pub fn len(&self) -> usize {
        self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    /// Bottom-to-top view.
    pub fn acts(&self) -> &[DialogueAct] {
        &self.pending
    }

    fn remove_where(&mut self, pred: impl Fn(&DialogueAct) -> bool) {
        self.pending.retain(|a| !pred(a));
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UserSession {
    goal: UserGoal,
    agenda: Agenda,
    answered: BTreeMap<String, Option<String>>,
    informed: BTreeSet<String>,
    booked: Option<u32>,
    turn: usize,
    active: bool,
    closing_next: bool,
    max_turns: usize,
}

/// Final verdict on a dialogue.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub success: bool,
    pub turns: usize,
    pub reward_total: f64,
}

/// Episode return: −1 per turn, plus `2·max_turns` on success or `−max_turns` on failure.
pub fn reward(turns: usize, success: bool, max_turns: usize) -> f64 {
    let terminal = if success { 2.0 * max_turns as f64 } else { -(max_turns as f64) };
    terminal - turns as f64
}

/// Opens a session. The agenda is built bottom-to-top as closing, thanks, one request
/// per wanted slot (deliverable on top of them), then informs for every constraint the
/// opening turn does not disclose.
pub fn start_session<R: Rng + ?Sized>(
    goal: UserGoal,
    schema: &Schema,
    max_turns: usize,
    rng: &mut R,
) -> (UserSession, DialogueAct) {
    let primary = schema.primary_slot();
    let deliverable = schema.deliverable();

    let extras: Vec<&String> = goal.inform_slots.keys().filter(|k| k.as_str() != primary).collect();
    let n_extra = rng.gen_range(0..=MAX_EXTRA_DISCLOSED.min(extras.len()));
    let disclosed: BTreeSet<String> = extras
        .into_iter()
        .choose_multiple(rng, n_extra)
        .into_iter()
        .cloned()
        .chain(std::iter::once(primary.to_string()))
        .collect();

    let mut first = DialogueAct::new(Speaker::User, FineIntent::inform(primary)).with_request(deliverable);
    for slot in &disclosed {
        first = first.with_inform(slot, &goal.inform_slots[slot]);
    }

    let mut agenda = Agenda::default();
    agenda.push(DialogueAct::bare(Speaker::User, BaseIntent::Closing));
    agenda.push(DialogueAct::bare(Speaker::User, BaseIntent::Thanks));
    for slot in schema.requestable() {
        if slot != deliverable && goal.request_slots.contains(slot) {
            agenda.push(DialogueAct::request(Speaker::User, slot));
        }
    }
    agenda.push(DialogueAct::request(Speaker::User, deliverable));
    let undisclosed: Vec<&str> = schema
        .informable()
        .filter(|s| goal.inform_slots.contains_key(*s) && !disclosed.contains(*s))
        .collect();
    for slot in undisclosed.into_iter().rev() {
        agenda.push(DialogueAct::inform(Speaker::User, slot, &goal.inform_slots[slot]));
    }

    let answered = goal.request_slots.iter().map(|s| (s.clone(), None)).collect();
    let session = UserSession {
        goal,
        agenda,
        answered,
        informed: disclosed,
        booked: None,
        turn: 0,
        active: true,
        closing_next: false,
        max_turns,
    };
    (session, first)
}

impl UserSession {
    pub fn goal(&self) -> &UserGoal {
        &self.goal
    }

    pub fn agenda(&self) -> &Agenda {
        &self.agenda
    }

    pub fn answered(&self) -> &BTreeMap<String, Option<String>> {
        &self.answered
    }

    pub fn informed(&self) -> &BTreeSet<String> {
        &self.informed
    }

    pub fn booked(&self) -> Option<u32> {
        self.booked
    }

    pub fn turn(&self) -> usize {
        self.turn
    }

    pub fn is_active(&self) -> bool {
        self.active
    }

    pub fn max_turns(&self) -> usize {
        self.max_turns
    }

    /// Answers one agent act. Rules, in order: a pending close after a booking; a
    /// booking; an agent request; an agent inform; a confirmation question; anything
    /// else pops the agenda.
    ///
    /// Panics if the session is over or the act is not from the agent.
    pub fn step(&mut self, agent_act: &DialogueAct, schema: &Schema) -> DialogueAct {
        assert!(self.active, "stepping an inactive session");
        assert_eq!(agent_act.speaker, Speaker::Agent, "user_step expects an agent act");
        self.turn += 1;

        let reply = if self.closing_next {
            DialogueAct::bare(Speaker::User, BaseIntent::Closing)
        } else if agent_act.is_booking(schema) {
            self.on_booking(agent_act, schema)
        } else {
            match agent_act.base() {
                BaseIntent::Request => self.on_request(agent_act, schema),
                BaseIntent::Inform => self.on_inform(agent_act),
                BaseIntent::ConfirmQuestion => self.on_confirm(agent_act),
                _ => self.next_agenda_act(),
            }
        };

        if reply.base() == BaseIntent::Closing || self.turn >= self.max_turns {
            self.active = false;
        }
        reply
    }

    fn on_booking(&mut self, act: &DialogueAct, schema: &Schema) -> DialogueAct {
        let deliverable = schema.deliverable();
        let offered: Option<u32> = act.inform_slots.get(deliverable).and_then(|v| v.parse().ok());
        let Some(id) = offered else {
            return self.top_pending_request(|_| true);
        };
        let unanswered = self
            .answered
            .iter()
            .any(|(slot, value)| slot.as_str() != deliverable && value.is_none());
        if unanswered {
            return self.top_pending_request(|slot| slot != deliverable);
        }
        self.booked = Some(id);
        self.answered.insert(deliverable.to_string(), Some(id.to_string()));
        self.agenda.remove_where(|a| a.base() == BaseIntent::Request && a.request_slots.contains(deliverable));
        self.closing_next = true;
        DialogueAct::bare(Speaker::User, BaseIntent::Thanks)
    }

    fn on_request(&mut self, act: &DialogueAct, schema: &Schema) -> DialogueAct {
        let Some(slot) = act.request_slots.iter().next().cloned() else {
            return self.next_agenda_act();
        };
        if !schema.is_informable(&slot) {
            return self.next_agenda_act();
        }
        let value = self.goal.inform_slots.get(&slot).map(String::as_str).unwrap_or(ANYTHING).to_string();
        self.agenda.remove_where(|a| a.base() == BaseIntent::Inform && a.inform_slots.contains_key(&slot));
        self.informed.insert(slot.clone());
        DialogueAct::inform(Speaker::User, &slot, &value)
    }

    fn on_inform(&mut self, act: &DialogueAct) -> DialogueAct {
        let mut denied = false;
        for (slot, value) in &act.inform_slots {
            if let Some(want) = self.goal.inform_slots.get(slot) {
                if !want.eq_ignore_ascii_case(value) {
                    self.agenda.push(DialogueAct::inform(Speaker::User, slot, want));
                    denied = true;
                }
            } else if self.answered.contains_key(slot) {
                self.answered.insert(slot.clone(), Some(value.clone()));
                self.agenda.remove_where(|a| a.base() == BaseIntent::Request && a.request_slots.contains(slot));
            }
        }
        if denied {
            DialogueAct::bare(Speaker::User, BaseIntent::Deny)
        } else {
            self.next_agenda_act()
        }
    }

    fn on_confirm(&mut self, act: &DialogueAct) -> DialogueAct {
        let mut answer = DialogueAct::bare(Speaker::User, BaseIntent::ConfirmAnswer);
        for (slot, value) in &act.inform_slots {
            if let Some(want) = self.goal.inform_slots.get(slot) {
                if !want.eq_ignore_ascii_case(value) {
                    answer = answer.with_inform(slot, want);
                }
                self.informed.insert(slot.clone());
            }
        }
        answer
    }

    /// Topmost request act for an unanswered slot accepted by `filter`.
    fn top_pending_request(&mut self, filter: impl Fn(&str) -> bool) -> DialogueAct {
        let found = self.agenda.acts().iter().rev().find(|a| {
            a.base() == BaseIntent::Request
                && a.request_slots.iter().any(|s| filter(s) && self.answered.get(s).is_some_and(Option::is_none))
        });
        match found {
            Some(act) => act.clone(),
            None => self.next_agenda_act(),
        }
    }

    /// Emits the agenda top. Informs and acknowledgements are consumed; requests stay
    /// until answered; closing stays as the floor of the stack.
    fn next_agenda_act(&mut self) -> DialogueAct {
        let top = self.agenda.top().cloned().expect("agenda holds closing until the session ends");
        match top.base() {
            BaseIntent::Request | BaseIntent::Closing => top,
            BaseIntent::Inform => {
                self.agenda.pop();
                self.informed.extend(top.inform_slots.keys().cloned());
                top
            }
            _ => {
                self.agenda.pop();
                top
            }
        }
    }
}

/// Judges a finished session against the true goal.
///
/// Success requires a booked record that satisfies every record-backed constraint and
/// agrees with every value the agent told the user.
pub fn evaluate_outcome(session: &UserSession, kb: &KnowledgeBase, schema: &Schema) -> Outcome {
    assert!(!session.active, "evaluating an active session");
    let success = session.booked.and_then(|id| kb.record(id)).is_some_and(|record| {
        let constraints_ok = record.matches(&session.goal.record_constraints(schema));
        let answers_ok = session.answered.iter().all(|(slot, told)| match told {
            None => false,
            Some(_) if slot.as_str() == schema.deliverable() => true,
            Some(value) => record.get(slot).is_some_and(|v| v.eq_ignore_ascii_case(value)),
        });
        constraints_ok && answers_ok
    });
    Outcome { success, turns: session.turn, reward_total: reward(session.turn, success, session.max_turns) }
}
