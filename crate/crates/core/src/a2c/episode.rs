use super::{attach_returns, encode_input, input_width, Hyperparams};
use crate::envs::{Environment, TaskDist, TaskRecord, TransitionKind};
use crate::nn::{heads, lstm_forward, softmax_sample, AgentParams, LstmState, Trajectory, TrajectoryStep};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Records trajectories for gradient updates.
    Train,
    /// Weights fixed; only the behavioural record is kept.
    Frozen,
}

/// One environment timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    /// Environment state index shown to the agent at this step.
    pub state: usize,
    /// `None` on steps that consume no decision.
    pub action: Option<usize>,
    pub reward: f64,
    pub transition: Option<TransitionKind>,
}

/// Complete behavioural record of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub dist: TaskDist,
    pub task: TaskRecord,
    pub steps: Vec<TrialRecord>,
}

impl EpisodeRecord {
    pub fn total_reward(&self) -> f64 {
        self.steps.iter().map(|s| s.reward).sum()
    }

    /// `(trial, arm)` for every step that consumed a decision.
    pub fn choices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.steps.iter().filter_map(|s| s.action.map(|a| (s.trial, a)))
    }

    /// `(arm, reward)` pairs of a bandit episode, in order.
    pub fn pulls(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.steps.iter().filter_map(|s| s.action.map(|a| (a, s.reward)))
    }
}

/// Plays one full episode from a zeroed recurrent state.
///
/// In [`Mode::Train`] the episode is cut into trajectories of at most
/// `hp.unroll` steps; each cut bootstraps from the critic's value at the next
/// step and the final one from 0. Both modes draw from `rng` identically, so a
/// frozen replay with the same seed reproduces the training-time actions.
pub fn run_episode(
    params: &AgentParams,
    env: &mut dyn Environment,
    hp: &Hyperparams,
    rng: &mut crate::Rng,
    mode: Mode,
) -> Result<(EpisodeRecord, Vec<Trajectory>)> {
    let actions = env.num_actions();
    let len = env.episode_len();
    let width = input_width(&hp.inputs, env.observation_size(), actions, env.reward_encoding());
    if params.input != width || params.actions != actions {
        return Err(Error::config(format!(
            "network expects {} inputs / {} actions, environment provides {} / {}",
            params.input, params.actions, width, actions
        )));
    }
    if hp.episode_len != len {
        return Err(Error::config(format!(
            "configured episode length {} but `{}` episodes last {len} steps",
            hp.episode_len,
            env.dist()
        )));
    }

    let mut state = LstmState::zeros(params.hidden);
    let mut prev_action = None;
    let mut prev_reward = None;
    let mut records = Vec::with_capacity(len);
    let mut steps: Vec<TrajectoryStep> = Vec::new();

    for t in 0..len {
        let obs = env.observation();
        let input = encode_input(&hp.inputs, &obs, actions, prev_action, prev_reward, env.reward_encoding(), t, len);
        let (h, next) = lstm_forward(params, &state, &input)?;
        let (logits, value) = heads(params, &h)?;
        let (action, log_prob, entropy) = if env.needs_action() {
            let (a, lp, ent) = softmax_sample(&logits, rng);
            (Some(a), lp, ent)
        } else {
            (None, 0.0, 0.0)
        };
        let trial = env.trial();
        let state_index = env.state_index();
        let outcome = env.step(action, rng)?;
        records.push(TrialRecord {
            trial,
            state: state_index,
            action,
            reward: outcome.reward,
            transition: action.and(env.last_transition()),
        });
        if mode == Mode::Train {
            steps.push(TrajectoryStep {
                input,
                state,
                action,
                log_prob,
                entropy,
                value,
                reward: outcome.reward,
                ret: 0.0,
                advantage: 0.0,
            });
        }
        state = next;
        prev_action = action;
        prev_reward = Some(outcome.reward);
        if outcome.done {
            if t + 1 != len {
                return Err(Error::config(format!("environment ended after {} of {len} steps", t + 1)));
            }
            break;
        }
    }

    let mut trajectories = Vec::new();
    if mode == Mode::Train {
        let unroll = hp.unroll.max(1);
        let values: Vec<f64> = steps.iter().map(|s| s.value).collect();
        let mut start = 0;
        let mut iter = steps.into_iter();
        while start < values.len() {
            let end = (start + unroll).min(values.len());
            let chunk: Vec<TrajectoryStep> = iter.by_ref().take(end - start).collect();
            let bootstrap = values.get(end).copied().unwrap_or(0.0);
            let mut traj = Trajectory { steps: chunk, bootstrap };
            attach_returns(&mut traj, hp.discount);
            trajectories.push(traj);
            start = end;
        }
    }

    Ok((EpisodeRecord { dist: env.dist(), task: env.task(), steps: records }, trajectories))
}

/// Frozen-weight evaluation on `episodes` freshly sampled tasks.
pub fn evaluate(
    params: &AgentParams,
    hp: &Hyperparams,
    dist: TaskDist,
    settings: &crate::envs::EnvSettings,
    episodes: usize,
    rng: &mut crate::Rng,
) -> Result<Vec<EpisodeRecord>> {
    (0..episodes)
        .map(|_| {
            let mut env = dist.sample_env(settings, rng);
            run_episode(params, env.as_mut(), hp, rng, Mode::Frozen).map(|(r, _)| r)
        })
        .collect()
}
