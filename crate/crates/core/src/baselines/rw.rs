use rand::Rng as _;

use crate::nn::softmax;
use crate::{Error, Result};

/// Rescorla-Wagner values plus choice parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RwState {
    pub q: Vec<f64>,
    /// Learning rate.
    pub alpha: f64,
    /// Softmax inverse temperature.
    pub beta: f64,
    /// Lapse rate.
    pub epsilon: f64,
}

impl RwState {
    /// Values start at 0.5, the prior mean of a Bernoulli arm.
    pub fn new(arms: usize, alpha: f64, beta: f64, epsilon: f64) -> Self {
        Self { q: vec![0.5; arms], alpha, beta, epsilon }
    }
}

/// `P(a) = epsilon / A + (1 - epsilon) softmax(beta q)_a`
pub fn rw_choice_probs(q: &[f64], beta: f64, epsilon: f64) -> Vec<f64> {
    let scaled: Vec<f64> = q.iter().map(|v| beta * v).collect();
    let uniform = 1.0 / q.len() as f64;
    softmax(&scaled).into_iter().map(|p| epsilon * uniform + (1.0 - epsilon) * p).collect()
}

pub fn rw_choose(state: &RwState, rng: &mut crate::Rng) -> usize {
    let arms = state.q.len();
    if rng.random::<f64>() < state.epsilon {
        return rng.random_range(0..arms);
    }
    let probs = softmax(&state.q.iter().map(|v| state.beta * v).collect::<Vec<_>>());
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (a, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return a;
        }
    }
    arms - 1
}

/// `q_a <- q_a + alpha (r - q_a)`
pub fn rw_update(state: &mut RwState, arm: usize, reward: f64) -> Result<()> {
    let arms = state.q.len();
    let q = state.q.get_mut(arm).ok_or(Error::ArmOutOfRange { arm, arms })?;
    *q += state.alpha * (reward - *q);
    Ok(())
}

/// Chooses an arm, asks `feedback` for its reward, and applies the update.
pub fn rw_step(state: &mut RwState, rng: &mut crate::Rng, feedback: impl FnOnce(usize) -> f64) -> Result<usize> {
    let arm = rw_choose(state, rng);
    let reward = feedback(arm);
    rw_update(state, arm, reward)?;
    Ok(arm)
}
