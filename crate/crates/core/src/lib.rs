//! Desk-scale laboratory for measuring how language-understanding errors affect a
//! reinforcement-learned task-completion dialogue agent.
//!
//! The pipeline is: an agenda-based simulated user ([`user_sim`]) pursues a hidden
//! movie-booking goal; its dialogue acts pass through a configurable noisy channel
//! ([`error_model`]); a state tracker and policy ([`manager`], [`qlearner`]) choose
//! agent acts; and [`lab`] runs the training and evaluation grid.

pub mod domain;
pub mod error_model;
pub mod lab;
pub mod manager;
pub mod qlearner;
pub mod user_sim;
