use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{run_episode, AgentKind, Controller, EpisodeRngs, ExperimentSetting, Lab};
use crate::qlearner::{DqnAgent, QNetwork};
use crate::user_sim::{reward, Outcome};

/// Number of trailing epochs averaged into a run's "final" figure.
pub const FINAL_WINDOW: usize = 10;

// Stream layout of one seed; disjoint per purpose so that settings sharing a seed see
// the same goals and opening turns.
const TRAIN_STREAMS: u64 = 0;
const WARM_STREAMS: u64 = 4;
const INIT_STREAM: u64 = 8;
const REPLAY_STREAM: u64 = 9;
const EVAL_STREAMS: u64 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub success_rate: f64,
    pub avg_reward: f64,
    pub avg_turns: f64,
}

impl EpochMetrics {
    /// Means over evaluation episodes, summed in episode order.
    pub fn from_outcomes(epoch: usize, outcomes: &[Outcome], max_turns: usize) -> Self {
        assert!(!outcomes.is_empty(), "epoch without evaluation episodes");
        let n = outcomes.len() as f64;
        let successes = outcomes.iter().filter(|o| o.success).count() as f64;
        let rewards: f64 = outcomes.iter().map(|o| reward(o.turns, o.success, max_turns)).sum();
        let turns: f64 = outcomes.iter().map(|o| o.turns as f64).sum();
        EpochMetrics { epoch, success_rate: successes / n, avg_reward: rewards / n, avg_turns: turns / n }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub setting: String,
    pub seed: u64,
    pub epochs: Vec<EpochMetrics>,
}

impl LearningCurve {
    pub fn final_success(&self) -> f64 {
        final_success(self.epochs.iter().map(|e| e.success_rate))
    }
}

/// Mean of the last [`FINAL_WINDOW`] values (or all of them, if fewer).
pub fn final_success(values: impl DoubleEndedIterator<Item = f64>) -> f64 {
    let tail: Vec<f64> = values.rev().take(FINAL_WINDOW).collect();
    assert!(!tail.is_empty(), "empty curve");
    tail.iter().sum::<f64>() / tail.len() as f64
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub curve: LearningCurve,
    /// Evaluation outcomes per epoch, in episode order.
    pub eval_outcomes: Vec<Vec<Outcome>>,
    /// Tab-separated turns of the last epoch's evaluation episodes, if requested.
    pub trace: Vec<String>,
    /// Final online network (DQN runs only).
    pub network: Option<QNetwork>,
}

/// One seeded run of a setting.
///
/// DQN: warm-start the replay memory with rule-policy episodes, then per epoch play
/// ε-greedy training episodes (one train step per collected transition after each),
/// sync the target network, and evaluate greedily with noise on. The rule agent only
/// runs the evaluation part. Evaluation episodes of epoch `e` use the same random
/// streams for every setting, so curves of different settings are paired.
pub fn run_training(lab: &Lab, setting: &ExperimentSetting, seed: u64, n_epochs: usize, trace: bool) -> RunResult {
    let cfg = &lab.config;
    let error = &setting.error;
    let mut agent = match setting.agent {
        AgentKind::Rule => None,
        AgentKind::Dqn => {
            let mut init = stream_rng(seed, INIT_STREAM);
            let mut agent = DqnAgent::new(lab.state_dim(), lab.n_actions(), cfg.dqn(), &mut init);
            let mut warm = EpisodeRngs::new(seed, WARM_STREAMS);
            for _ in 0..cfg.warm_start_episodes {
                let ep = run_episode(lab, Controller::Rule, error, &mut warm, true, None);
                agent.remember_all(ep.transitions);
            }
            Some(agent)
        }
    };
    let mut train_rngs = EpisodeRngs::new(seed, TRAIN_STREAMS);
    let mut replay_rng = stream_rng(seed, REPLAY_STREAM);

    let mut epochs = Vec::with_capacity(n_epochs);
    let mut eval_outcomes = Vec::with_capacity(n_epochs);
    let mut lines = Vec::new();
    for epoch in 1..=n_epochs {
        if let Some(agent) = agent.as_mut() {
            for _ in 0..cfg.episodes_per_epoch {
                let controller = Controller::EpsilonGreedy(&agent.online, cfg.epsilon);
                let ep = run_episode(lab, controller, error, &mut train_rngs, true, None);
                let n = ep.transitions.len();
                agent.remember_all(ep.transitions);
                for _ in 0..n {
                    agent.train_step(&mut replay_rng);
                }
            }
            agent.sync_target();
        }

        let mut eval = EpisodeRngs::new(seed, EVAL_STREAMS + 4 * epoch as u64);
        let record_trace = trace && epoch == n_epochs;
        let mut outcomes = Vec::with_capacity(cfg.eval_episodes);
        for _ in 0..cfg.eval_episodes {
            let controller = match agent.as_ref() {
                Some(a) => Controller::Greedy(&a.online),
                None => Controller::Rule,
            };
            let sink = if record_trace { Some(&mut lines) } else { None };
            let ep = run_episode(lab, controller, error, &mut eval, false, sink);
            if record_trace {
                lines.push(String::new());
            }
            outcomes.push(ep.outcome);
        }
        epochs.push(EpochMetrics::from_outcomes(epoch, &outcomes, cfg.max_turns));
        eval_outcomes.push(outcomes);
    }
    RunResult {
        curve: LearningCurve { setting: setting.name.clone(), seed, epochs },
        eval_outcomes,
        trace: lines,
        network: agent.map(|a| a.online),
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
