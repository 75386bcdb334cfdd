use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Environment, StepOutcome, TaskDist, TaskRecord};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Low,
    High,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Low => "low",
            Regime::High => "high",
        }
    }
}

/// Jump process of the restless bandit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestlessParams {
    /// Per-step jump probability in low-volatility episodes.
    pub lambda_low: f64,
    /// Per-step jump probability in high-volatility episodes.
    pub lambda_high: f64,
    /// Standard deviation of a jump in `p1`.
    pub jump_sd: f64,
    /// Probability an episode is high-volatility.
    pub high_fraction: f64,
}

impl Default for RestlessParams {
    fn default() -> Self {
        Self { lambda_low: 0.02, lambda_high: 0.1, jump_sd: 0.25, high_fraction: 0.5 }
    }
}

impl RestlessParams {
    pub fn rate(&self, regime: Regime) -> f64 {
        match regime {
            Regime::Low => self.lambda_low,
            Regime::High => self.lambda_high,
        }
    }
}

/// Two anti-correlated arms, `p2 = 1 - p1`, whose `p1` jumps at random times.
#[derive(Debug, Clone, PartialEq)]
pub struct RestlessState {
    pub p1: f64,
    pub regime: Regime,
    pub lambda: f64,
    pub jump_sd: f64,
    pub step: usize,
    /// Number of jump events so far, including clipped ones that left `p1` unchanged.
    pub jumps: usize,
}

impl RestlessState {
    pub fn p2(&self) -> f64 {
        1.0 - self.p1
    }
}

pub fn restless_init(regime: Regime, params: &RestlessParams, rng: &mut crate::Rng) -> RestlessState {
    RestlessState { p1: rng.random::<f64>(), regime, lambda: params.rate(regime), jump_sd: params.jump_sd, step: 0, jumps: 0 }
}

/// Advances one step: with probability `lambda`, `p1` jumps by `N(0, jump_sd^2)`, clipped to `[0,1]`.
pub fn restless_step(state: &RestlessState, rng: &mut crate::Rng) -> RestlessState {
    let mut next = state.clone();
    next.step += 1;
    if rng.random::<f64>() < state.lambda {
        let jump = if state.jump_sd > 0.0 { Normal::new(0.0, state.jump_sd).expect("positive sd").sample(rng) } else { 0.0 };
        next.p1 = (state.p1 + jump).clamp(0.0, 1.0);
        next.jumps += 1;
    }
    next
}

/// One restless episode; keeps the full `p1` trajectory for regret analysis.
#[derive(Debug, Clone)]
pub struct RestlessEnv {
    state: RestlessState,
    trials: usize,
    history: Vec<f64>,
}

impl RestlessEnv {
    pub fn new(state: RestlessState, trials: usize) -> Self {
        let history = vec![state.p1];
        Self { state, trials, history }
    }

    /// Draws the regime (high with probability `high_fraction`) and the initial `p1`.
    pub fn sample(params: RestlessParams, trials: usize, rng: &mut crate::Rng) -> Self {
        let regime = if rng.random::<f64>() < params.high_fraction { Regime::High } else { Regime::Low };
        Self::new(restless_init(regime, &params, rng), trials)
    }

    pub fn state(&self) -> &RestlessState {
        &self.state
    }

    pub fn regime(&self) -> Regime {
        self.state.regime
    }
}

impl Environment for RestlessEnv {
    fn num_actions(&self) -> usize {
        2
    }

    fn observation_size(&self) -> usize {
        0
    }

    fn episode_len(&self) -> usize {
        self.trials
    }

    fn observation(&self) -> Vec<f64> {
        Vec::new()
    }

    fn trial(&self) -> usize {
        self.state.step
    }

    fn step(&mut self, action: Option<usize>, rng: &mut crate::Rng) -> Result<StepOutcome> {
        let arm = action.ok_or_else(|| Error::InvalidAction("restless step requires an arm".into()))?;
        let p = match arm {
            0 => self.state.p1,
            1 => self.state.p2(),
            _ => return Err(Error::ArmOutOfRange { arm, arms: 2 }),
        };
        let reward = if rng.random::<f64>() < p { 1.0 } else { 0.0 };
        self.state = restless_step(&self.state, rng);
        let done = self.state.step >= self.trials;
        if !done {
            self.history.push(self.state.p1);
        }
        Ok(StepOutcome { reward, done })
    }

    fn task(&self) -> TaskRecord {
        TaskRecord::Restless { p1: self.history.clone(), regime: self.state.regime }
    }

    fn dist(&self) -> TaskDist {
        TaskDist::Restless
    }
}
