//! Task distributions and episode dynamics.

mod bandit;
mod restless;
mod twostep;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bandit::{
    informative_task, pull, reward_level, sample_informative_task, sample_task, ArmModel, BanditEnv, BanditTask,
    INFORMATIVE_ARMS, INFORMATIVE_LEVELS, INFORMATIVE_TRIALS,
};
pub use restless::{restless_init, restless_step, Regime, RestlessEnv, RestlessParams, RestlessState};
pub use twostep::{two_step_act, two_step_reset, Stage, TransitionKind, TwoStepEnv, TwoStepMdp, TWO_STEP_TRIALS};

use crate::{Error, Result};

/// Task distribution tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TaskDist {
    /// Independent arms, `p1, p2 ~ U[0,1]`.
    Independent,
    /// `p1 ~ U[0,1]`, `p2 = 1 - p1`.
    Uniform,
    /// `p1 ~ U{0.1, 0.9}`, `p2 = 1 - p1`.
    Easy,
    /// `p1 ~ U{0.25, 0.75}`, `p2 = 1 - p1`.
    Medium,
    /// `p1 ~ U{0.4, 0.6}`, `p2 = 1 - p1`.
    Hard,
    Informative,
    Restless,
    TwoStep,
}

impl TaskDist {
    pub const ALL: [TaskDist; 8] = [
        TaskDist::Independent,
        TaskDist::Uniform,
        TaskDist::Easy,
        TaskDist::Medium,
        TaskDist::Hard,
        TaskDist::Informative,
        TaskDist::Restless,
        TaskDist::TwoStep,
    ];

    /// The five two-armed stationary Bernoulli families.
    pub const BERNOULLI: [TaskDist; 5] =
        [TaskDist::Independent, TaskDist::Uniform, TaskDist::Easy, TaskDist::Medium, TaskDist::Hard];

    pub fn tag(self) -> &'static str {
        match self {
            TaskDist::Independent => "di",
            TaskDist::Uniform => "du",
            TaskDist::Easy => "de",
            TaskDist::Medium => "dm",
            TaskDist::Hard => "dh",
            TaskDist::Informative => "informative",
            TaskDist::Restless => "restless",
            TaskDist::TwoStep => "twostep",
        }
    }

    pub fn is_stationary_bernoulli(self) -> bool {
        Self::BERNOULLI.contains(&self)
    }

    pub fn num_actions(self) -> usize {
        if self == TaskDist::Informative {
            INFORMATIVE_ARMS
        } else {
            2
        }
    }

    pub fn observation_size(self) -> usize {
        if self == TaskDist::TwoStep {
            3
        } else {
            0
        }
    }

    pub fn reward_encoding(self) -> RewardEncoding {
        if self == TaskDist::Informative {
            RewardEncoding::InformativeLevels
        } else {
            RewardEncoding::Scalar
        }
    }

    /// Timesteps per trial.
    pub fn steps_per_trial(self) -> usize {
        if self == TaskDist::TwoStep {
            2
        } else {
            1
        }
    }

    /// Samples a fresh environment for one episode.
    pub fn sample_env(self, settings: &EnvSettings, rng: &mut crate::Rng) -> Box<dyn Environment> {
        match self {
            TaskDist::Restless => Box::new(RestlessEnv::sample(settings.restless, settings.trials, rng)),
            TaskDist::TwoStep => Box::new(TwoStepEnv::new(two_step_reset(rng), settings.trials)),
            TaskDist::Informative => Box::new(BanditEnv::new(sample_informative_task(rng), settings.trials)),
            d => Box::new(BanditEnv::new(
                sample_task(d, rng).expect("stationary Bernoulli families always sample"),
                settings.trials,
            )),
        }
    }
}

impl fmt::Display for TaskDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for TaskDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TaskDist::ALL
            .into_iter()
            .find(|d| d.tag() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownDistribution(s.to_string()))
    }
}

impl TryFrom<String> for TaskDist {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TaskDist> for String {
    fn from(d: TaskDist) -> String {
        d.tag().to_string()
    }
}

/// Per-episode environment settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvSettings {
    /// Trials per episode.
    pub trials: usize,
    pub restless: RestlessParams,
}

impl Default for EnvSettings {
    fn default() -> Self {
        Self { trials: 100, restless: RestlessParams::default() }
    }
}

/// How the previous reward is presented to the agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewardEncoding {
    Scalar,
    /// One-hot over [`INFORMATIVE_LEVELS`]; all zeros before the first reward.
    InformativeLevels,
}

impl RewardEncoding {
    pub fn width(self) -> usize {
        match self {
            RewardEncoding::Scalar => 1,
            RewardEncoding::InformativeLevels => INFORMATIVE_LEVELS.len(),
        }
    }
}

/// What one environment step produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub done: bool,
}

/// Immutable description of the task an episode was played on, kept for post-hoc analysis.
#[derive(Debug, Clone, PartialEq)]
pub enum TaskRecord {
    Bandit(BanditTask),
    /// `p1` trajectory, one entry per trial.
    Restless {
        p1: Vec<f64>,
        regime: Regime,
    },
    /// Second-stage state that pays with probability 0.9.
    TwoStep {
        good_state: Stage,
    },
}

impl TaskRecord {
    pub fn num_arms(&self) -> usize {
        match self {
            TaskRecord::Bandit(b) => b.num_arms(),
            TaskRecord::Restless { .. } | TaskRecord::TwoStep { .. } => 2,
        }
    }

    /// Expected reward of `arm` at trial `t`.
    pub fn mean(&self, arm: usize, t: usize) -> Result<f64> {
        if arm >= self.num_arms() {
            return Err(Error::ArmOutOfRange { arm, arms: self.num_arms() });
        }
        match self {
            TaskRecord::Bandit(b) => Ok(b.mean(arm)),
            TaskRecord::Restless { p1, .. } => {
                let p = *p1.get(t).ok_or_else(|| Error::InvalidRecord(format!("trial {t} beyond restless record")))?;
                Ok(if arm == 0 { p } else { 1.0 - p })
            }
            TaskRecord::TwoStep { good_state } => {
                let common = if arm == 0 { Stage::S2 } else { Stage::S3 };
                let p = |s: Stage| if s == *good_state { twostep::REWARD_HIGH } else { twostep::REWARD_LOW };
                let rare = if common == Stage::S2 { Stage::S3 } else { Stage::S2 };
                Ok(twostep::COMMON_PROB * p(common) + (1.0 - twostep::COMMON_PROB) * p(rare))
            }
        }
    }

    /// Lowest-index arm with the largest expected reward at trial `t`.
    pub fn optimal_arm(&self, t: usize) -> Result<usize> {
        let mut best = 0;
        let mut best_v = self.mean(0, t)?;
        for a in 1..self.num_arms() {
            let v = self.mean(a, t)?;
            if v > best_v {
                best = a;
                best_v = v;
            }
        }
        Ok(best)
    }
}

/// `mu*` of a task at trial `t`: the best instantaneous expected reward.
pub fn optimal_expected_reward(task: &TaskRecord, t: usize) -> Result<f64> {
    (0..task.num_arms()).map(|a| task.mean(a, t)).try_fold(f64::NEG_INFINITY, |m, v| Ok(m.max(v?)))
}

/// A single episode's worth of task dynamics.
///
/// The agent loop reads [`Environment::observation`], decides whether an action
/// is needed, then calls [`Environment::step`] until `done`.
pub trait Environment {
    fn num_actions(&self) -> usize;
    /// Width of the observation vector; zero for bandits.
    fn observation_size(&self) -> usize;
    /// Number of timesteps in the episode.
    fn episode_len(&self) -> usize;
    fn reward_encoding(&self) -> RewardEncoding {
        RewardEncoding::Scalar
    }
    fn observation(&self) -> Vec<f64>;
    /// Whether the current timestep consumes an action.
    fn needs_action(&self) -> bool {
        true
    }
    /// Current trial index (0-based).
    fn trial(&self) -> usize;
    /// Index of the current environment state, for records.
    fn state_index(&self) -> usize {
        0
    }
    /// Transition kind of the most recent decision, if the task has one.
    fn last_transition(&self) -> Option<TransitionKind> {
        None
    }
    fn step(&mut self, action: Option<usize>, rng: &mut crate::Rng) -> Result<StepOutcome>;
    fn task(&self) -> TaskRecord;
    fn dist(&self) -> TaskDist;
}
