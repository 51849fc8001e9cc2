use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::{BaseIntent, DialogueAct, FineIntent, KnowledgeBase, Schema, Speaker, ANYTHING};

use super::DialogueState;

/// One entry of the agent's discrete action inventory.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionTemplate {
    Greeting,
    Thanks,
    Closing,
    ConfirmQuestion(String),
    Request(String),
    Inform(String),
    Book,
}

impl fmt::Display for ActionTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionTemplate::Greeting => f.write_str("greeting"),
            ActionTemplate::Thanks => f.write_str("thanks"),
            ActionTemplate::Closing => f.write_str("closing"),
            ActionTemplate::ConfirmQuestion(s) => write!(f, "confirm_question({s})"),
            ActionTemplate::Request(s) => write!(f, "request({s})"),
            ActionTemplate::Inform(s) => write!(f, "inform({s})"),
            ActionTemplate::Book => f.write_str("book_ticket"),
        }
    }
}

/// Fixed, ordered action inventory: greeting, thanks, closing, a confirmation per
/// informable slot, a request per requestable slot, an inform per informable slot,
/// and booking.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSet {
    templates: Vec<ActionTemplate>,
}

impl ActionSet {
    pub fn new(schema: &Schema) -> Self {
        let mut templates = vec![ActionTemplate::Greeting, ActionTemplate::Thanks, ActionTemplate::Closing];
        templates.extend(schema.informable().map(|s| ActionTemplate::ConfirmQuestion(s.to_string())));
        templates.extend(schema.requestable().map(|s| ActionTemplate::Request(s.to_string())));
        templates.extend(schema.informable().map(|s| ActionTemplate::Inform(s.to_string())));
        templates.push(ActionTemplate::Book);
        ActionSet { templates }
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn get(&self, index: usize) -> &ActionTemplate {
        &self.templates[index]
    }

    pub fn index_of(&self, template: &ActionTemplate) -> Option<usize> {
        self.templates.iter().position(|t| t == template)
    }

    pub fn templates(&self) -> &[ActionTemplate] {
        &self.templates
    }

    pub fn names(&self) -> Vec<String> {
        self.templates.iter().map(ToString::to_string).collect()
    }
}

/// Turns an action index into a concrete agent act for the current state.
///
/// Informs and bookings read from the lowest-id record matching the tracked
/// constraints. A confirmation of a slot with no tracked value becomes a request
/// when the slot is requestable.
pub fn realize_agent_action(
    actions: &ActionSet,
    index: usize,
    state: &DialogueState,
    schema: &Schema,
    kb: &KnowledgeBase,
) -> DialogueAct {
    let agent = Speaker::Agent;
    match actions.get(index) {
        ActionTemplate::Greeting => DialogueAct::bare(agent, BaseIntent::Greeting),
        ActionTemplate::Thanks => DialogueAct::bare(agent, BaseIntent::Thanks),
        ActionTemplate::Closing => DialogueAct::bare(agent, BaseIntent::Closing),
        ActionTemplate::Request(slot) => DialogueAct::request(agent, slot),
        ActionTemplate::Inform(slot) => {
            let value = match kb.first_match(state.constraints()).and_then(|r| r.get(slot)) {
                Some(v) => v.to_string(),
                None => state.constraints().get(slot).cloned().unwrap_or_else(|| ANYTHING.to_string()),
            };
            DialogueAct::inform(agent, slot, &value)
        }
        ActionTemplate::ConfirmQuestion(slot) => match state.constraints().get(slot) {
            Some(value) => DialogueAct::new(agent, BaseIntent::ConfirmQuestion.into()).with_inform(slot, value),
            None if schema.is_requestable(slot) => DialogueAct::request(agent, slot),
            None => DialogueAct::new(agent, BaseIntent::ConfirmQuestion.into()).with_inform(slot, ANYTHING),
        },
        ActionTemplate::Book => {
            let ticket = kb.first_match(state.constraints()).map(|r| r.id.to_string()).unwrap_or_else(|| "none".into());
            DialogueAct::new(agent, FineIntent::inform(schema.deliverable())).with_inform(schema.deliverable(), &ticket)
        }
    }
}
