use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{LabConfig, LabError};
use crate::domain::{sample_goal, DialogueAct, GoalProfile, KnowledgeBase, Schema};
use crate::error_model::{corrupt_act, ErrorConfig};
use crate::manager::{realize_agent_action, rule_policy, ActionSet, DialogueState, StateEncoder};
use crate::qlearner::{select_action, QNetwork, Transition};
use crate::user_sim::{evaluate_outcome, start_session, Outcome};

/// Shared, read-only environment of a run: schema, knowledge base, action inventory
/// and state encoder.
#[derive(Clone, Debug)]
pub struct Lab {
    pub config: LabConfig,
    pub schema: Schema,
    pub kb: KnowledgeBase,
    pub actions: ActionSet,
    pub encoder: StateEncoder,
    pub goals: GoalProfile,
}

impl Lab {
    pub fn new(config: LabConfig) -> Result<Self, LabError> {
        config.validate()?;
        let schema = match &config.schema_path {
            Some(path) => Schema::load(path)?,
            None => Schema::movie(),
        };
        let kb = KnowledgeBase::synthesize(&schema, config.kb_seed, config.kb_size)?;
        let actions = ActionSet::new(&schema);
        let encoder = StateEncoder::new(&schema, actions.len(), config.max_turns);
        Ok(Lab { config, schema, kb, actions, encoder, goals: GoalProfile::default() })
    }

    pub fn state_dim(&self) -> usize {
        self.encoder.dimension()
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }
}

/// Who picks the agent's actions.
#[derive(Clone, Copy, Debug)]
pub enum Controller<'a> {
    Rule,
    Greedy(&'a QNetwork),
    EpsilonGreedy(&'a QNetwork, f64),
}

/// Independent random streams of one episode sequence: goals, opening turns,
/// channel noise, exploration.
#[derive(Clone, Debug)]
pub struct EpisodeRngs {
    pub goal: ChaCha8Rng,
    pub user: ChaCha8Rng,
    pub error: ChaCha8Rng,
    pub policy: ChaCha8Rng,
}

impl EpisodeRngs {
    /// Streams `base..base+4` of the ChaCha generator keyed by `seed`.
    pub fn new(seed: u64, base: u64) -> Self {
        let stream = |k: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(base + k);
            rng
        };
        EpisodeRngs { goal: stream(0), user: stream(1), error: stream(2), policy: stream(3) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Episode {
    pub outcome: Outcome,
    /// One per exchange when recording was requested, otherwise empty.
    pub transitions: Vec<Transition>,
    pub user_acts: usize,
    pub corrupted_acts: usize,
}

/// Plays one dialogue.
///
/// Each exchange: the user act passes through the channel, the tracker absorbs it, the
/// controller picks an action, the tracker records the realized agent act, and the user
/// answers the true agent act. Every transition carries −1; the last one also carries
/// the success bonus or failure penalty, so the rewards sum to [`crate::user_sim::reward`].
pub fn run_episode(
    lab: &Lab,
    controller: Controller<'_>,
    error: &ErrorConfig,
    rngs: &mut EpisodeRngs,
    record: bool,
    mut trace: Option<&mut Vec<String>>,
) -> Episode {
    let max_turns = lab.config.max_turns;
    let goal = sample_goal(&lab.kb, &lab.schema, &lab.goals, &mut rngs.goal).expect("knowledge base is non-empty");
    let (mut session, mut user_act) = start_session(goal, &lab.schema, max_turns, &mut rngs.user);
    let mut state = DialogueState::new(&lab.kb);
    let mut transitions = Vec::new();
    let mut pending: Option<(Vec<f64>, usize)> = None;
    let (mut user_acts, mut corrupted_acts) = (0, 0);

    loop {
        let (heard, corruption) = corrupt_act(&user_act, error, &lab.schema, &lab.kb, &mut rngs.error);
        user_acts += 1;
        if !corruption.is_clean() {
            corrupted_acts += 1;
        }
        if let Some(lines) = trace.as_deref_mut() {
            lines.push(trace_line(session.turn(), &heard, !corruption.is_clean()));
        }
        state.track_user(&heard, &lab.kb);

        let needs_vector = record || !matches!(controller, Controller::Rule);
        let s = if needs_vector { lab.encoder.encode(&state) } else { Vec::new() };
        if let Some((prev, action)) = pending.take() {
            transitions.push(Transition { state: prev, action, reward: -1.0, next_state: s.clone(), terminal: false });
        }

        let action = match controller {
            Controller::Rule => rule_policy(&state, &lab.schema, &lab.actions),
            Controller::Greedy(net) => select_action(net, &s, 0.0, &mut rngs.policy),
            Controller::EpsilonGreedy(net, eps) => select_action(net, &s, eps, &mut rngs.policy),
        };
        let agent_act = realize_agent_action(&lab.actions, action, &state, &lab.schema, &lab.kb);
        if let Some(lines) = trace.as_deref_mut() {
            lines.push(trace_line(session.turn(), &agent_act, false));
        }
        state.track_agent(&agent_act, Some(action), &lab.schema, &lab.kb);
        user_act = session.step(&agent_act, &lab.schema);

        if !session.is_active() {
            let outcome = evaluate_outcome(&session, &lab.kb, &lab.schema);
            if record {
                let terminal_bonus = outcome.reward_total + outcome.turns as f64;
                transitions.push(Transition {
                    state: s.clone(),
                    action,
                    reward: -1.0 + terminal_bonus,
                    next_state: s,
                    terminal: true,
                });
            }
            if let Some(lines) = trace.as_deref_mut() {
                lines.push(trace_line(session.turn(), &user_act, false));
            }
            return Episode { outcome, transitions, user_acts, corrupted_acts };
        }
        if record {
            pending = Some((s, action));
        }
    }
}

/// `turn, speaker, intent, inform_slots, request_slots, corrupted`, tab-separated.
pub fn trace_line(turn: usize, act: &DialogueAct, corrupted: bool) -> String {
    format!(
        "{turn}\t{}\t{}\t{}\t{}\t{}",
        act.speaker,
        act.intent,
        act.inform_field(),
        act.request_field(),
        u8::from(corrupted)
    )
}
