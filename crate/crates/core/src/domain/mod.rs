//! Semantic-frame algebra of the movie-booking domain: intents, slots, acts,
//! user goals and the knowledge base they are checked against.

mod act;
mod goal;
mod intent;
mod kb;
mod schema;

use thiserror::Error;

pub use act::{is_wildcard, DialogueAct, Speaker, ANYTHING};
pub use goal::{sample_goal, sample_goal_with_source, GoalProfile, UserGoal};
pub use intent::{intent_group, BaseIntent, FineIntent, IntentGroup};
pub use kb::{query_kb, value_pool, KnowledgeBase, MovieRecord};
pub use schema::{Schema, SlotSpec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DomainError {
    #[error("schema line {line}: {msg}")]
    Schema { line: usize, msg: String },
    #[error("unknown intent `{0}`")]
    UnknownIntent(String),
    #[error("malformed intent: {0}")]
    MalformedIntent(String),
    #[error("malformed act {0}")]
    MalformedAct(String),
    #[error("malformed goal: {0}")]
    MalformedGoal(String),
    #[error("knowledge base: {0}")]
    KnowledgeBase(String),
    #[error("io: {0}")]
    Io(String),
}
