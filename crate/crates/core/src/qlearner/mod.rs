//! Deep Q-network written from scratch: rectifier MLP with hand-derived gradients,
//! uniform experience replay, a periodically synced target network and ε-greedy
//! action selection.

pub mod checkpoint;
mod dqn;
mod network;
mod replay;

pub use dqn::{
    accumulate_q_gradient, argmax, q_gradient, select_action, td_loss, td_targets, DqnAgent, DqnConfig, StepOutcome,
};
pub use network::{q_forward, sync_target, Gradients, QNetwork, Scratch};
pub use replay::{ReplayBuffer, Transition};
