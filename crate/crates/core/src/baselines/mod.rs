//! Classical comparison policies for two-armed Bernoulli bandits.

mod gittins;
mod rw;
mod thompson;
mod ucb;

pub use gittins::{gittins_choose, gittins_table, GittinsTable};
pub use rw::{rw_choice_probs, rw_choose, rw_step, rw_update, RwState};
pub use thompson::{thompson_choose, thompson_restless_update, thompson_update, BetaPosterior};
pub use ucb::ucb_choose;

use std::sync::Arc;

use crate::a2c::{EpisodeRecord, TrialRecord};
use crate::envs::Environment;
use crate::{Error, Result};

/// A bandit algorithm that chooses an arm, then sees the reward.
pub trait BanditPolicy {
    fn name(&self) -> &'static str;
    /// Forget everything; called at the start of each episode.
    fn reset(&mut self, arms: usize);
    fn choose(&mut self, rng: &mut crate::Rng) -> Result<usize>;
    fn update(&mut self, arm: usize, reward: f64) -> Result<()>;
}

/// Plays one full bandit episode with `policy`.
pub fn play_episode(policy: &mut dyn BanditPolicy, env: &mut dyn Environment, rng: &mut crate::Rng) -> Result<EpisodeRecord> {
    policy.reset(env.num_actions());
    let mut steps = Vec::with_capacity(env.episode_len());
    loop {
        if !env.needs_action() {
            return Err(Error::config(format!("{} can only play bandit tasks", policy.name())));
        }
        let trial = env.trial();
        let arm = policy.choose(rng)?;
        let outcome = env.step(Some(arm), rng)?;
        policy.update(arm, outcome.reward)?;
        steps.push(TrialRecord { trial, state: env.state_index(), action: Some(arm), reward: outcome.reward, transition: None });
        if outcome.done {
            break;
        }
    }
    Ok(EpisodeRecord { dist: env.dist(), task: env.task(), steps })
}

/// Finite-horizon Bayes-optimal play from a precomputed table.
#[derive(Debug, Clone)]
pub struct GittinsPolicy {
    table: Arc<GittinsTable>,
    posterior: BetaPosterior,
    t: usize,
}

impl GittinsPolicy {
    pub fn new(table: Arc<GittinsTable>) -> Self {
        Self { table, posterior: BetaPosterior::uniform(2), t: 0 }
    }
}

impl BanditPolicy for GittinsPolicy {
    fn name(&self) -> &'static str {
        "gittins"
    }

    fn reset(&mut self, arms: usize) {
        self.posterior = BetaPosterior::uniform(arms);
        self.t = 0;
    }

    fn choose(&mut self, _rng: &mut crate::Rng) -> Result<usize> {
        gittins_choose(&self.table, &self.posterior, self.t)
    }

    fn update(&mut self, arm: usize, reward: f64) -> Result<()> {
        thompson_update(&mut self.posterior, arm, reward)?;
        self.t += 1;
        Ok(())
    }
}

/// UCB with exploration bonus `sqrt(chi ln t / n_i)`.
#[derive(Debug, Clone)]
pub struct UcbPolicy {
    pub chi: f64,
    counts: Vec<usize>,
    sums: Vec<f64>,
}

impl UcbPolicy {
    pub fn new(chi: f64) -> Self {
        Self { chi, counts: Vec::new(), sums: Vec::new() }
    }
}

impl BanditPolicy for UcbPolicy {
    fn name(&self) -> &'static str {
        "ucb"
    }

    fn reset(&mut self, arms: usize) {
        self.counts = vec![0; arms];
        self.sums = vec![0.0; arms];
    }

    fn choose(&mut self, _rng: &mut crate::Rng) -> Result<usize> {
        let means: Vec<f64> = self.counts.iter().zip(&self.sums).map(|(&n, &s)| if n > 0 { s / n as f64 } else { 0.0 }).collect();
        let t = self.counts.iter().sum::<usize>().max(1);
        Ok(ucb_choose(&self.counts, &means, t, self.chi))
    }

    fn update(&mut self, arm: usize, reward: f64) -> Result<()> {
        let arms = self.counts.len();
        let n = self.counts.get_mut(arm).ok_or(Error::ArmOutOfRange { arm, arms })?;
        *n += 1;
        self.sums[arm] += reward;
        Ok(())
    }
}

/// Thompson sampling with Beta(1,1) priors; with `decay` set, pseudo-counts
/// shrink toward the prior before each update to track a drifting task.
#[derive(Debug, Clone)]
pub struct ThompsonPolicy {
    pub decay: Option<f64>,
    posterior: BetaPosterior,
}

impl ThompsonPolicy {
    pub fn stationary() -> Self {
        Self { decay: None, posterior: BetaPosterior::uniform(2) }
    }

    pub fn restless(decay: f64) -> Self {
        Self { decay: Some(decay), posterior: BetaPosterior::uniform(2) }
    }
}

impl BanditPolicy for ThompsonPolicy {
    fn name(&self) -> &'static str {
        if self.decay.is_some() {
            "thompson_restless"
        } else {
            "thompson"
        }
    }

    fn reset(&mut self, arms: usize) {
        self.posterior = BetaPosterior::uniform(arms);
    }

    fn choose(&mut self, rng: &mut crate::Rng) -> Result<usize> {
        Ok(thompson_choose(&self.posterior, rng))
    }

    fn update(&mut self, arm: usize, reward: f64) -> Result<()> {
        match self.decay {
            Some(phi) => thompson_restless_update(&mut self.posterior, arm, reward, phi),
            None => thompson_update(&mut self.posterior, arm, reward),
        }
    }
}

/// Rescorla-Wagner learner with softmax choice and lapse.
#[derive(Debug, Clone)]
pub struct RwPolicy {
    pub state: RwState,
}

impl RwPolicy {
    pub fn new(alpha: f64, beta: f64, epsilon: f64) -> Self {
        Self { state: RwState::new(2, alpha, beta, epsilon) }
    }
}

impl BanditPolicy for RwPolicy {
    fn name(&self) -> &'static str {
        "rw"
    }

    fn reset(&mut self, arms: usize) {
        self.state = RwState::new(arms, self.state.alpha, self.state.beta, self.state.epsilon);
    }

    fn choose(&mut self, rng: &mut crate::Rng) -> Result<usize> {
        Ok(rw_choose(&self.state, rng))
    }

    fn update(&mut self, arm: usize, reward: f64) -> Result<()> {
        rw_update(&mut self.state, arm, reward)
    }
}
