use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::LabError;
use crate::qlearner::DqnConfig;
use crate::user_sim::DEFAULT_MAX_TURNS;

/// Every tunable of a lab run. Parsed from flat `key = value` text; unspecified keys
/// keep their defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabConfig {
    pub schema_path: Option<PathBuf>,
    pub kb_seed: u64,
    pub kb_size: usize,
    pub max_turns: usize,
    pub gamma: f64,
    pub lr: f64,
    pub hidden: usize,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub epsilon: f64,
    pub warm_start_episodes: usize,
    pub episodes_per_epoch: usize,
    pub eval_episodes: usize,
}

impl Default for LabConfig {
    fn default() -> Self {
        let dqn = DqnConfig::default();
        LabConfig {
            schema_path: None,
            kb_seed: 2017,
            kb_size: 100,
            max_turns: DEFAULT_MAX_TURNS,
            gamma: dqn.gamma,
            lr: dqn.lr,
            hidden: dqn.hidden,
            batch_size: dqn.batch_size,
            buffer_capacity: dqn.buffer_capacity,
            epsilon: dqn.epsilon,
            warm_start_episodes: 100,
            episodes_per_epoch: 100,
            eval_episodes: 100,
        }
    }
}

impl LabConfig {
    pub const KEYS: [&'static str; 13] = [
        "schema_path",
        "kb_seed",
        "kb_size",
        "max_turns",
        "gamma",
        "lr",
        "hidden",
        "batch_size",
        "buffer_capacity",
        "epsilon",
        "warm_start_episodes",
        "episodes_per_epoch",
        "eval_episodes",
    ];

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LabError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
        LabConfig::default().apply(&text)
    }

    /// Applies `key = value` lines on top of `self`. Blank lines and `#` comments are skipped.
    pub fn apply(mut self, text: &str) -> Result<Self, LabError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| LabError::Config { line: i + 1, msg };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            self.set(key, value).map_err(err)?;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
            value.parse().map_err(|_| format!("bad value `{value}` for `{key}`"))
        }
        match key {
            "schema_path" => self.schema_path = Some(PathBuf::from(value)),
            "kb_seed" => self.kb_seed = num(key, value)?,
            "kb_size" => self.kb_size = num(key, value)?,
            "max_turns" => self.max_turns = num(key, value)?,
            "gamma" => self.gamma = num(key, value)?,
            "lr" => self.lr = num(key, value)?,
            "hidden" => self.hidden = num(key, value)?,
            "batch_size" => self.batch_size = num(key, value)?,
            "buffer_capacity" => self.buffer_capacity = num(key, value)?,
            "epsilon" => self.epsilon = num(key, value)?,
            "warm_start_episodes" => self.warm_start_episodes = num(key, value)?,
            "episodes_per_epoch" => self.episodes_per_epoch = num(key, value)?,
            "eval_episodes" => self.eval_episodes = num(key, value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |msg: &str| Err(LabError::Config { line: 0, msg: msg.to_string() });
        if self.kb_size == 0 {
            return bad("kb_size must be at least 1");
        }
        if self.max_turns == 0 {
            return bad("max_turns must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return bad("epsilon must lie in [0, 1]");
        }
        if self.hidden == 0 || self.batch_size == 0 || self.buffer_capacity == 0 {
            return bad("hidden, batch_size and buffer_capacity must be positive");
        }
        if self.eval_episodes == 0 {
            return bad("eval_episodes must be at least 1");
        }
        Ok(())
    }

    pub fn dqn(&self) -> DqnConfig {
        DqnConfig {
            hidden: self.hidden,
            gamma: self.gamma,
            lr: self.lr,
            batch_size: self.batch_size,
            buffer_capacity: self.buffer_capacity,
            epsilon: self.epsilon,
            ..DqnConfig::default()
        }
    }

    /// Resolved configuration in the same `key = value` syntax.
    pub fn to_text(&self) -> String {
        let schema = self.schema_path.as_ref().map(|p| p.display().to_string());
        let mut out = String::new();
        if let Some(s) = schema {
            out.push_str(&format!("schema_path = {s}\n"));
        }
        out.push_str(&format!(
            "kb_seed = {}\nkb_size = {}\nmax_turns = {}\ngamma = {}\nlr = {}\nhidden = {}\nbatch_size = {}\n\
             buffer_capacity = {}\nepsilon = {}\nwarm_start_episodes = {}\nepisodes_per_epoch = {}\neval_episodes = {}\n",
            self.kb_seed,
            self.kb_size,
            self.max_turns,
            self.gamma,
            self.lr,
            self.hidden,
            self.batch_size,
            self.buffer_capacity,
            self.epsilon,
            self.warm_start_episodes,
            self.episodes_per_epoch,
            self.eval_episodes
        ));
        out
    }
}
