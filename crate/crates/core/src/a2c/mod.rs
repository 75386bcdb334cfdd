//! Advantage actor-critic: targets, loss, entropy schedule, episode loop and trainer.

mod episode;
mod input;
mod returns;
mod train;

use serde::{Deserialize, Serialize};

pub use episode::{evaluate, run_episode, EpisodeRecord, Mode, TrialRecord};
pub use input::{encode_input, input_width, InputFlags};
pub use returns::{a2c_loss, attach_returns, compute_advantages};
pub use train::{train, train_from, CurvePoint, LearningCurve, TrainOutput};

use crate::nn::RmsProp;
use crate::{Error, Result};

/// Weights of the three loss terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    /// Weight on the policy-gradient term; 1 during training.
    pub policy: f64,
    /// `beta_v`
    pub value: f64,
    /// `beta_e`, the current entropy coefficient.
    pub entropy: f64,
}

impl LossWeights {
    pub fn new(value: f64, entropy: f64) -> Self {
        Self { policy: 1.0, value, entropy }
    }
}

/// Entropy coefficient interpolated linearly from `start` to `end` over training.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropySchedule {
    pub start: f64,
    pub end: f64,
}

impl EntropySchedule {
    pub fn constant(v: f64) -> Self {
        Self { start: v, end: v }
    }

    pub fn annealed(start: f64, end: f64) -> Self {
        Self { start, end }
    }
}

/// `beta_e` at `episode` of `total_episodes`.
pub fn anneal_beta_e(episode: usize, total_episodes: usize, schedule: &EntropySchedule) -> f64 {
    if schedule.start == schedule.end || total_episodes == 0 {
        return schedule.start;
    }
    let frac = (episode.min(total_episodes)) as f64 / total_episodes as f64;
    schedule.start + (schedule.end - schedule.start) * frac
}

/// One training configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub learning_rate: f64,
    /// `gamma`
    pub discount: f64,
    /// `beta_v`
    pub value_coef: f64,
    /// `beta_e`
    pub entropy: EntropySchedule,
    /// Steps per gradient update.
    pub unroll: usize,
    pub trials: usize,
    /// Timesteps per episode.
    pub episode_len: usize,
    pub inputs: InputFlags,
    pub episodes: usize,
    pub hidden: usize,
    #[serde(default)]
    pub rmsprop_decay: Option<f64>,
    #[serde(default)]
    pub max_grad_norm: Option<f64>,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            discount: 0.9,
            value_coef: 0.05,
            entropy: EntropySchedule::annealed(1.0, 0.0),
            unroll: 100,
            trials: 100,
            episode_len: 100,
            inputs: InputFlags::default(),
            episodes: 20_000,
            hidden: 48,
            rmsprop_decay: None,
            max_grad_norm: None,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.discount) {
            return Err(Error::config(format!("discount {} outside [0,1]", self.discount)));
        }
        if self.unroll == 0 {
            return Err(Error::config("unroll length must be at least 1"));
        }
        if self.hidden == 0 {
            return Err(Error::config("hidden size must be at least 1"));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config(format!("learning rate {} is invalid", self.learning_rate)));
        }
        if self.value_coef < 0.0 || self.entropy.start < 0.0 || self.entropy.end < 0.0 {
            return Err(Error::config("loss weights must be non-negative"));
        }
        if self.episode_len < self.trials || self.episode_len % self.trials.max(1) != 0 {
            return Err(Error::config(format!(
                "episode length {} is not a whole number of steps per trial for {} trials",
                self.episode_len, self.trials
            )));
        }
        Ok(())
    }

    pub fn optimizer(&self) -> RmsProp {
        let mut opt = RmsProp::default();
        if let Some(d) = self.rmsprop_decay {
            opt.decay = d;
        }
        if let Some(g) = self.max_grad_norm {
            opt.max_grad_norm = g;
        }
        opt
    }

    pub fn loss_weights(&self, episode: usize) -> LossWeights {
        LossWeights::new(self.value_coef, anneal_beta_e(episode, self.episodes, &self.entropy))
    }
}
