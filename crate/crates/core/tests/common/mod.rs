//! Checks shared by the focused test files and the acceptance report. Each returns a
//! one-line summary on success and a description of the first violation otherwise.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Binomial, DiscreteCDF};

use dialogue_noise_lab::domain::{
    intent_group, query_kb, DialogueAct, FineIntent, IntentGroup, KnowledgeBase, Schema, Speaker, ANYTHING,
};
use dialogue_noise_lab::error_model::{corrupt_act, IntentErrorType};
use dialogue_noise_lab::lab::{preset, preset_names};
use dialogue_noise_lab::qlearner::{q_gradient, td_loss, td_targets, DqnAgent, DqnConfig, QNetwork, Transition};

pub type Check = Result<String, String>;

pub fn movie_world() -> (Schema, KnowledgeBase) {
    let schema = Schema::movie();
    let kb = KnowledgeBase::synthesize(&schema, 2017, 100).unwrap();
    (schema, kb)
}

/// A well-formed user act with a uniformly chosen group and fine intent.
pub fn random_user_act<R: Rng>(schema: &Schema, kb: &KnowledgeBase, rng: &mut R) -> DialogueAct {
    let informable: Vec<&str> = schema.informable().collect();
    let value = |slot: &str, rng: &mut R| kb.vocabulary(slot).choose(rng).unwrap().clone();
    match rng.gen_range(0..3) {
        0 => {
            let general = schema.fine_intents(IntentGroup::General);
            DialogueAct::new(Speaker::User, general.choose(rng).unwrap().clone())
        }
        1 => {
            let n = rng.gen_range(1..=3);
            let slots: Vec<&str> = informable.choose_multiple(rng, n).copied().collect();
            let mut act = DialogueAct::new(Speaker::User, FineIntent::inform(slots[0]));
            for s in slots {
                let v = value(s, rng);
                act = act.with_inform(s, &v);
            }
            act
        }
        _ => {
            let requestable: Vec<&str> = schema.requestable().collect();
            let anchor = *requestable.choose(rng).unwrap();
            let mut act = DialogueAct::request(Speaker::User, anchor);
            if rng.gen_bool(0.5) {
                let s = *informable.choose(rng).unwrap();
                let v = value(s, rng);
                act = act.with_inform(s, &v);
            }
            act
        }
    }
}

/// Two-sided 99.9% binomial acceptance region for `n` trials at rate `p`.
pub fn binomial_interval(n: u64, p: f64) -> (u64, u64) {
    if p == 0.0 {
        return (0, 0);
    }
    if p == 1.0 {
        return (n, n);
    }
    let dist = Binomial::new(p, n).unwrap();
    (dist.inverse_cdf(0.0005), dist.inverse_cdf(0.9995))
}

/// Corruption frequencies of every preset over `n_acts` user acts, plus the group rules
/// of the two pure intent-error modes.
pub fn error_model_statistics(n_acts: usize) -> Check {
    let (schema, kb) = movie_world();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let corpus: Vec<DialogueAct> = (0..n_acts).map(|_| random_user_act(&schema, &kb, &mut rng)).collect();
    let n_pairs: u64 = corpus.iter().map(|a| a.inform_slots.len() as u64).sum();

    let mut summary = Vec::new();
    for name in preset_names() {
        let cfg = preset(name).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (mut intent_hits, mut slot_hits) = (0u64, 0u64);
        for act in &corpus {
            let (out, rec) = corrupt_act(act, &cfg, &schema, &kb, &mut rng);
            out.validate_structure(&schema).map_err(|e| format!("{name}: malformed output {e}"))?;
            if rec.intent_corrupted {
                intent_hits += 1;
                let same = intent_group(&out.intent) == intent_group(&act.intent);
                match cfg.intent_type {
                    IntentErrorType::WithinGroup if !same => {
                        return Err(format!("{name}: within-group error moved {} to {}", act.intent, out.intent))
                    }
                    IntentErrorType::BetweenGroup if same => {
                        return Err(format!("{name}: between-group error kept {} in its group", act.intent))
                    }
                    _ => {}
                }
                if out.intent == act.intent {
                    return Err(format!("{name}: corrupted intent {} unchanged", act.intent));
                }
            }
            slot_hits += rec.slots_corrupted as u64;
        }
        let (lo, hi) = binomial_interval(n_acts as u64, cfg.intent_rate);
        if !(lo..=hi).contains(&intent_hits) {
            return Err(format!("{name}: {intent_hits} intent errors outside [{lo}, {hi}]"));
        }
        let (lo, hi) = binomial_interval(n_pairs, cfg.slot_rate);
        if !(lo..=hi).contains(&slot_hits) {
            return Err(format!("{name}: {slot_hits} slot errors outside [{lo}, {hi}]"));
        }
        summary.push(format!(
            "{name} {:.4}/{:.4}",
            intent_hits as f64 / n_acts as f64,
            slot_hits as f64 / n_pairs as f64
        ));
    }
    Ok(format!("{n_acts} acts, {n_pairs} pairs; {}", summary.join(", ")))
}

fn brute_force(kb: &KnowledgeBase, constraints: &BTreeMap<String, String>) -> Vec<u32> {
    kb.records()
        .iter()
        .filter(|r| {
            constraints.iter().all(|(slot, v)| {
                v.eq_ignore_ascii_case(ANYTHING)
                    || match r.values.get(slot) {
                        Some(rv) => rv.to_lowercase() == v.to_lowercase(),
                        None => true,
                    }
            })
        })
        .map(|r| r.id)
        .collect()
}

pub fn query_oracle(n_queries: usize) -> Check {
    let (schema, kb) = movie_world();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let informable: Vec<&str> = schema.informable().collect();
    let mut nonempty = 0;
    for _ in 0..n_queries {
        let n = rng.gen_range(0..=4);
        let mut constraints = BTreeMap::new();
        for slot in informable.choose_multiple(&mut rng, n) {
            let v = match rng.gen_range(0..10) {
                0 => ANYTHING.to_uppercase(),
                1 => "no-such-value".to_string(),
                2 => kb.vocabulary(slot).choose(&mut rng).unwrap().to_uppercase(),
                _ => kb.vocabulary(slot).choose(&mut rng).unwrap().clone(),
            };
            constraints.insert(slot.to_string(), v);
        }
        let got: Vec<u32> = query_kb(&kb, &constraints).iter().map(|r| r.id).collect();
        let want = brute_force(&kb, &constraints);
        if got != want {
            return Err(format!("query {constraints:?}: got {got:?}, brute force {want:?}"));
        }
        nonempty += (!got.is_empty()) as usize;
    }
    Ok(format!("{n_queries} queries agree ({nonempty} non-empty)"))
}

fn transition(state: Vec<f64>, action: usize, reward: f64, next_state: Vec<f64>, terminal: bool) -> Transition {
    Transition { state, action, reward, next_state, terminal }
}

/// Two fixtures whose targets are worked out by hand in the comments.
pub fn td_fixtures() -> Check {
    // Q(s) = W2·relu(W1·s + b1) + b2 with d=2, h=2, a=2.
    let mut net = QNetwork::zeros(2, 2, 2);
    net.set_w1(0, 0, 1.0);
    net.set_w1(1, 1, 2.0);
    net.b1_mut()[1] = -1.0;
    net.set_w2(0, 0, 1.0);
    net.set_w2(1, 1, 0.5);
    net.b2_mut()[0] = 0.25;
    // s'=[3,1]: hidden [3, 1] → Q = [3.25, 0.5]; max 3.25.
    // s'=[-1,0.25]: hidden [0, 0] → Q = [0.25, 0]; max 0.25.
    // s'=[0,4]: hidden [0, 7] → Q = [0.25, 3.5]; max 3.5.
    let batch = [
        transition(vec![0.0, 0.0], 0, -1.0, vec![3.0, 1.0], false),
        transition(vec![0.0, 0.0], 1, 2.0, vec![-1.0, 0.25], false),
        transition(vec![0.0, 0.0], 0, 79.0, vec![0.0, 4.0], true),
        transition(vec![0.0, 0.0], 1, -1.0, vec![0.0, 4.0], false),
    ];
    let cases: [(f64, [f64; 4]); 2] = [
        // γ=0.5: -1+1.625, 2+0.125, 79, -1+1.75
        (0.5, [0.625, 2.125, 79.0, 0.75]),
        // γ=0.9: -1+2.925, 2+0.225, 79, -1+3.15
        (0.9, [1.925, 2.225, 79.0, 2.15]),
    ];
    for (gamma, want) in cases {
        let got = td_targets(batch.iter(), &net, gamma);
        for (g, w) in got.iter().zip(want) {
            if (g - w).abs() > 1e-12 {
                return Err(format!("γ={gamma}: targets {got:?}, expected {want:?}"));
            }
        }
    }
    Ok("2 fixtures, 8 targets exact".into())
}

/// Analytic loss gradient against central differences on small random networks.
pub fn gradient_check(n_instances: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < n_instances {
        let (d, h, a) = (rng.gen_range(2..6), rng.gen_range(2..7), rng.gen_range(2..5));
        let mut net = QNetwork::random(d, h, a, 0.5, &mut rng);
        let batch: Vec<Transition> = (0..rng.gen_range(1..5))
            .map(|_| {
                let s: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                transition(s.clone(), rng.gen_range(0..a), 0.0, s, true)
            })
            .collect();
        // Central differences are meaningless across a ReLU kink; redraw such instances.
        let near_kink = batch.iter().any(|t| {
            (0..h).any(|j| {
                let pre: f64 = net.b1()[j] + (0..d).map(|i| net.w1(j, i) * t.state[i]).sum::<f64>();
                pre.abs() < 1e-3
            })
        });
        if near_kink {
            continue;
        }
        let refs: Vec<&Transition> = batch.iter().collect();
        let targets: Vec<f64> = (0..batch.len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let analytic: Vec<f64> = q_gradient(&net, &refs, &targets).iter().collect();
        let eps = 1e-5;
        for (k, a_k) in analytic.iter().enumerate() {
            let original = net.params().nth(k).unwrap();
            *net.params_mut().nth(k).unwrap() = original + eps;
            let up = td_loss(&net, &refs, &targets);
            *net.params_mut().nth(k).unwrap() = original - eps;
            let down = td_loss(&net, &refs, &targets);
            *net.params_mut().nth(k).unwrap() = original;
            let numeric = (up - down) / (2.0 * eps);
            let rel = (a_k - numeric).abs() / a_k.abs().max(numeric.abs()).max(1e-6);
            worst = worst.max(rel);
        }
        done += 1;
    }
    if worst < 1e-4 {
        Ok(format!("{n_instances} instances, max relative error {worst:.2e}"))
    } else {
        Err(format!("max relative error {worst:.2e} ≥ 1e-4"))
    }
}

/// Two states A, B (one-hot), two actions.
/// A: a0 → end, r=1; a1 → B, r=0.  B: a0 → A, r=0; a1 → end, r=2.
pub fn toy_step(state: usize, action: usize) -> (f64, Option<usize>) {
    match (state, action) {
        (0, 0) => (1.0, None),
        (0, 1) => (0.0, Some(1)),
        (1, 0) => (0.0, Some(0)),
        _ => (2.0, None),
    }
}

/// Optimal greedy policy of the toy problem by value iteration.
pub fn toy_optimal_policy(gamma: f64) -> [usize; 2] {
    let mut v = [0.0f64; 2];
    let q = |v: &[f64; 2], s: usize, a: usize| {
        let (r, next) = toy_step(s, a);
        r + next.map_or(0.0, |n| gamma * v[n])
    };
    for _ in 0..1000 {
        v = [0, 1].map(|s| q(&v, s, 0).max(q(&v, s, 1)));
    }
    [0, 1].map(|s| if q(&v, s, 1) > q(&v, s, 0) { 1 } else { 0 })
}

fn one_hot(s: usize) -> Vec<f64> {
    let mut v = vec![0.0; 2];
    v[s] = 1.0;
    v
}

/// Trains a fresh agent on the toy problem with ε-greedy exploration for `steps`
/// train steps and returns its greedy policy.
pub fn train_toy(seed: u64, steps: usize) -> [usize; 2] {
    let gamma = 0.9;
    let config = DqnConfig { hidden: 16, gamma, lr: 0.05, batch_size: 16, epsilon: 0.3, ..DqnConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agent = DqnAgent::new(2, 2, config.clone(), &mut rng);
    let mut state = rng.gen_range(0..2);
    for step in 0..steps {
        let action = agent.act(&one_hot(state), config.epsilon, &mut rng);
        let (r, next) = toy_step(state, action);
        let next_state = next.unwrap_or(state);
        agent.remember(transition(one_hot(state), action, r, one_hot(next_state), next.is_none()));
        state = next.unwrap_or_else(|| rng.gen_range(0..2));
        agent.train_step(&mut rng);
        if step % 50 == 49 {
            agent.sync_target();
        }
    }
    [0, 1].map(|s| agent.act(&one_hot(s), 0.0, &mut rng))
}

pub fn toy_convergence(n_seeds: u64, steps: usize) -> Check {
    let optimal = toy_optimal_policy(0.9);
    for seed in 1..=n_seeds {
        let learned = train_toy(seed, steps);
        if learned != optimal {
            return Err(format!("seed {seed}: learned {learned:?}, optimal {optimal:?}"));
        }
    }
    Ok(format!("{n_seeds}/{n_seeds} seeds reach {optimal:?} within {steps} steps"))
}

/// Average ranks; ties share the mean of their positions.
fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        for &k in &idx[i..=j] {
            r[k] = (i + j) as f64 / 2.0;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation.
pub fn spearman(points: &[(f64, f64)]) -> f64 {
    let a = ranks(&points.iter().map(|p| p.0).collect::<Vec<_>>());
    let b = ranks(&points.iter().map(|p| p.1).collect::<Vec<_>>());
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}
