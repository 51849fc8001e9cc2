//! Dialogue manager: state tracking, feature encoding, the agent action inventory
//! and the rule-based baseline policy.

mod actions;
mod encode;
mod rule;
mod tracker;

pub use actions::{realize_agent_action, ActionSet, ActionTemplate};
pub use encode::{StateEncoder, KB_BUCKETS};
pub use rule::rule_policy;
pub use tracker::{reset_tracker, DialogueState};
