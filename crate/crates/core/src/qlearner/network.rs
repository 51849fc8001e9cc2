use rand::Rng;
use serde::{Deserialize, Serialize};

/// One-hidden-layer rectifier MLP mapping a state vector to one Q-value per action:
/// `Q = W2 · relu(W1 · s + b1) + b2`.
///
/// Weights are stored input-major (`w1[j*H + i]` is `W1[i][j]`, `w2[i*A + a]` is
/// `W2[a][i]`) so that the sparse one-hot state vectors only touch the columns they use.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QNetwork {
    d: usize,
    h: usize,
    a: usize,
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
}

/// Parameter-shaped gradient (same layout as [`QNetwork`]).
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl Gradients {
    pub fn zeros_like(net: &QNetwork) -> Self {
        Gradients {
            w1: vec![0.0; net.w1.len()],
            b1: vec![0.0; net.b1.len()],
            w2: vec![0.0; net.w2.len()],
            b2: vec![0.0; net.b2.len()],
        }
    }

    pub fn clear(&mut self) {
        for block in [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2] {
            block.fill(0.0);
        }
    }

    pub fn norm(&self) -> f64 {
        [&self.w1, &self.b1, &self.w2, &self.b2]
            .iter()
            .flat_map(|b| b.iter())
            .map(|g| g * g)
            .sum::<f64>()
            .sqrt()
    }

    /// Rescales so the global norm is at most `max_norm`; returns the norm before clipping.
    pub fn clip_norm(&mut self, max_norm: f64) -> f64 {
        let norm = self.norm();
        if norm > max_norm && norm > 0.0 {
            let scale = max_norm / norm;
            for block in [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2] {
                block.iter_mut().for_each(|g| *g *= scale);
            }
        }
        norm
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.w1.iter().chain(&self.b1).chain(&self.w2).chain(&self.b2).copied()
    }
}

/// Reusable activations for one forward pass.
#[derive(Clone, Debug, Default)]
pub struct Scratch {
    pub hidden: Vec<f64>,
    pub q: Vec<f64>,
}

impl QNetwork {
    pub fn zeros(d: usize, h: usize, a: usize) -> Self {
        QNetwork { d, h, a, w1: vec![0.0; d * h], b1: vec![0.0; h], w2: vec![0.0; h * a], b2: vec![0.0; a] }
    }

    /// Every parameter uniform in `[-scale, scale]`.
    pub fn random<R: Rng + ?Sized>(d: usize, h: usize, a: usize, scale: f64, rng: &mut R) -> Self {
        let mut net = QNetwork::zeros(d, h, a);
        net.params_mut().for_each(|p| *p = rng.gen_range(-scale..=scale));
        net
    }

    pub fn input_dim(&self) -> usize {
        self.d
    }

    pub fn hidden_dim(&self) -> usize {
        self.h
    }

    pub fn n_actions(&self) -> usize {
        self.a
    }

    pub fn n_params(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    /// `W1[i][j]`
    pub fn w1(&self, i: usize, j: usize) -> f64 {
        self.w1[j * self.h + i]
    }

    pub fn set_w1(&mut self, i: usize, j: usize, v: f64) {
        self.w1[j * self.h + i] = v;
    }

    pub fn b1(&self) -> &[f64] {
        &self.b1
    }

    pub fn b1_mut(&mut self) -> &mut [f64] {
        &mut self.b1
    }

    /// `W2[a][i]`
    pub fn w2(&self, a: usize, i: usize) -> f64 {
        self.w2[i * self.a + a]
    }

    pub fn set_w2(&mut self, a: usize, i: usize, v: f64) {
        self.w2[i * self.a + a] = v;
    }

    pub fn b2(&self) -> &[f64] {
        &self.b2
    }

    pub fn b2_mut(&mut self) -> &mut [f64] {
        &mut self.b2
    }

    /// Parameters in storage order (W1 input-major, b1, W2 hidden-major, b2).
    pub fn params(&self) -> impl Iterator<Item = f64> + '_ {
        self.w1.iter().chain(&self.b1).chain(&self.w2).chain(&self.b2).copied()
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.w1.iter_mut().chain(self.b1.iter_mut()).chain(self.w2.iter_mut()).chain(self.b2.iter_mut())
    }

    pub fn is_finite(&self) -> bool {
        self.params().all(f64::is_finite)
    }

    pub fn forward(&self, s: &[f64]) -> Vec<f64> {
        let mut scratch = Scratch::default();
        self.forward_into(s, &mut scratch);
        scratch.q
    }

    pub fn forward_into(&self, s: &[f64], scratch: &mut Scratch) {
        assert_eq!(s.len(), self.d, "state dimension mismatch");
        let h = self.h;
        scratch.hidden.clear();
        scratch.hidden.extend_from_slice(&self.b1);
        for (j, &x) in s.iter().enumerate() {
            if x != 0.0 {
                let col = &self.w1[j * h..(j + 1) * h];
                for (acc, w) in scratch.hidden.iter_mut().zip(col) {
                    *acc += x * w;
                }
            }
        }
        for v in scratch.hidden.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let a = self.a;
        scratch.q.clear();
        scratch.q.extend_from_slice(&self.b2);
        for (i, &z) in scratch.hidden.iter().enumerate() {
            if z > 0.0 {
                let row = &self.w2[i * a..(i + 1) * a];
                for (q, w) in scratch.q.iter_mut().zip(row) {
                    *q += z * w;
                }
            }
        }
    }

    /// Adds the gradient of `coef · Q(s)[action]` to `grads`. `scratch` must hold the
    /// forward pass for `s`.
    pub fn accumulate_gradient(&self, s: &[f64], action: usize, coef: f64, scratch: &Scratch, grads: &mut Gradients) {
        let (h, a) = (self.h, self.a);
        grads.b2[action] += coef;
        let mut delta = vec![0.0; h];
        for i in 0..h {
            let z = scratch.hidden[i];
            if z > 0.0 {
                grads.w2[i * a + action] += coef * z;
                delta[i] = coef * self.w2[i * a + action];
                grads.b1[i] += delta[i];
            }
        }
        for (j, &x) in s.iter().enumerate() {
            if x != 0.0 {
                for (g, d) in grads.w1[j * h..(j + 1) * h].iter_mut().zip(delta.iter()) {
                    *g += d * x;
                }
            }
        }
    }

    /// `θ ← θ − lr · g`
    pub fn apply_gradients(&mut self, grads: &Gradients, lr: f64) {
        for (p, g) in self.w1.iter_mut().zip(&grads.w1) {
            *p -= lr * g;
        }
        for (p, g) in self.b1.iter_mut().zip(&grads.b1) {
            *p -= lr * g;
        }
        for (p, g) in self.w2.iter_mut().zip(&grads.w2) {
            *p -= lr * g;
        }
        for (p, g) in self.b2.iter_mut().zip(&grads.b2) {
            *p -= lr * g;
        }
    }
}

pub fn q_forward(net: &QNetwork, s: &[f64]) -> Vec<f64> {
    net.forward(s)
}

/// Deep copy used as the target network.
pub fn sync_target(net: &QNetwork) -> QNetwork {
    net.clone()
}
