use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Gradients, QNetwork, ReplayBuffer, Scratch, Transition};

/// Learning hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DqnConfig {
    pub hidden: usize,
    pub gamma: f64,
    pub lr: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub epsilon: f64,
    pub clip_norm: f64,
    pub init_scale: f64,
}

impl Default for DqnConfig {
    fn default() -> Self {
        DqnConfig {
            hidden: 80,
            gamma: 0.9,
            lr: 0.03,
            batch_size: 16,
            buffer_capacity: 10_000,
            epsilon: 0.1,
            clip_norm: 1.0,
            init_scale: 0.1,
        }
    }
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// ε-greedy choice. With ε = 0 no randomness is drawn.
pub fn select_action<R: Rng + ?Sized>(net: &QNetwork, s: &[f64], epsilon: f64, rng: &mut R) -> usize {
    if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
        return rng.gen_range(0..net.n_actions());
    }
    argmax(&net.forward(s))
}

/// `y = r` for terminal transitions, else `r + γ · max_a Q_target(s′, a)`.
pub fn td_targets<'a, I>(batch: I, target_net: &QNetwork, gamma: f64) -> Vec<f64>
where
    I: IntoIterator<Item = &'a Transition>,
{
    let mut scratch = Scratch::default();
    batch
        .into_iter()
        .map(|t| {
            if t.terminal || gamma == 0.0 {
                t.reward
            } else {
                target_net.forward_into(&t.next_state, &mut scratch);
                t.reward + gamma * scratch.q.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            }
        })
        .collect()
}

/// Mean squared TD error `(1/N) Σ (Q(sᵢ, aᵢ) − yᵢ)²`.
pub fn td_loss(net: &QNetwork, batch: &[&Transition], targets: &[f64]) -> f64 {
    let mut scratch = Scratch::default();
    let n = batch.len() as f64;
    batch
        .iter()
        .zip(targets)
        .map(|(t, y)| {
            net.forward_into(&t.state, &mut scratch);
            (scratch.q[t.action] - y).powi(2)
        })
        .sum::<f64>()
        / n
}

/// Exact gradient of [`td_loss`]; only each taken action's output carries error.
pub fn q_gradient(net: &QNetwork, batch: &[&Transition], targets: &[f64]) -> Gradients {
    let mut grads = Gradients::zeros_like(net);
    accumulate_q_gradient(net, batch, targets, &mut grads, &mut Scratch::default());
    grads
}

/// [`q_gradient`] into a caller-owned buffer; returns the loss at the current parameters.
pub fn accumulate_q_gradient(
    net: &QNetwork,
    batch: &[&Transition],
    targets: &[f64],
    grads: &mut Gradients,
    scratch: &mut Scratch,
) -> f64 {
    assert_eq!(batch.len(), targets.len());
    let n = batch.len() as f64;
    let mut loss = 0.0;
    for (t, y) in batch.iter().zip(targets) {
        net.forward_into(&t.state, scratch);
        let err = scratch.q[t.action] - y;
        loss += err * err;
        net.accumulate_gradient(&t.state, t.action, 2.0 * err / n, scratch, grads);
    }
    loss / n
}

/// Result of one attempted update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepOutcome {
    /// Loss before the update and gradient norm before clipping.
    Updated { loss: f64, grad_norm: f64 },
    /// Fewer transitions than one minibatch; nothing changed.
    Underfilled,
}

/// Online network, target network and replay memory of one training run.
///
/// `max_a Q_target(s′)` of each stored transition is memoized until the next target
/// sync; the values are the ones [`td_targets`] would compute.
#[derive(Clone, Debug)]
pub struct DqnAgent {
    pub online: QNetwork,
    target: QNetwork,
    buffer: ReplayBuffer,
    /// Parallel to `buffer`; NaN marks an entry not yet evaluated under `target`.
    next_max: VecDeque<f64>,
    pub config: DqnConfig,
    grads: Gradients,
    scratch: Scratch,
}

impl DqnAgent {
    pub fn new<R: Rng + ?Sized>(state_dim: usize, n_actions: usize, config: DqnConfig, rng: &mut R) -> Self {
        let online = QNetwork::random(state_dim, config.hidden, n_actions, config.init_scale, rng);
        DqnAgent::from_network(online, config)
    }

    pub fn from_network(online: QNetwork, config: DqnConfig) -> Self {
        let target = online.clone();
        let grads = Gradients::zeros_like(&online);
        DqnAgent {
            online,
            target,
            buffer: ReplayBuffer::new(config.buffer_capacity),
            next_max: VecDeque::with_capacity(config.buffer_capacity),
            config,
            grads,
            scratch: Scratch::default(),
        }
    }

    pub fn target(&self) -> &QNetwork {
        &self.target
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn remember(&mut self, t: Transition) {
        if self.buffer.len() == self.buffer.capacity() {
            self.next_max.pop_front();
        }
        self.buffer.push(t);
        self.next_max.push_back(f64::NAN);
    }

    pub fn remember_all(&mut self, ts: impl IntoIterator<Item = Transition>) {
        for t in ts {
            self.remember(t);
        }
    }

    pub fn act<R: Rng + ?Sized>(&self, s: &[f64], epsilon: f64, rng: &mut R) -> usize {
        select_action(&self.online, s, epsilon, rng)
    }

    pub fn sync_target(&mut self) {
        self.target = self.online.clone();
        self.next_max.iter_mut().for_each(|v| *v = f64::NAN);
    }

    /// Samples a minibatch, regresses Q(s, a) toward the target-network TD targets and
    /// takes one clipped gradient step.
    pub fn train_step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> StepOutcome {
        let cfg = self.config;
        if self.buffer.len() < cfg.batch_size || cfg.batch_size == 0 {
            return StepOutcome::Underfilled;
        }
        let idx = self.buffer.sample_indices(cfg.batch_size, rng);
        let mut targets = Vec::with_capacity(idx.len());
        for &i in &idx {
            let t = self.buffer.get(i);
            let y = if t.terminal || cfg.gamma == 0.0 {
                t.reward
            } else {
                if self.next_max[i].is_nan() {
                    self.target.forward_into(&t.next_state, &mut self.scratch);
                    self.next_max[i] = self.scratch.q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                }
                t.reward + cfg.gamma * self.next_max[i]
            };
            targets.push(y);
        }
        let batch: Vec<&Transition> = idx.iter().map(|&i| self.buffer.get(i)).collect();
        self.grads.clear();
        let loss = accumulate_q_gradient(&self.online, &batch, &targets, &mut self.grads, &mut self.scratch);
        let grad_norm = self.grads.clip_norm(cfg.clip_norm);
        self.online.apply_gradients(&self.grads, cfg.lr);
        debug_assert!(self.online.is_finite());
        StepOutcome::Updated { loss, grad_norm }
    }
}
