use super::LossWeights;
use crate::nn::{LossBreakdown, Trajectory};
use crate::{Error, Result};

/// Discounted returns by backward recursion `R_t = r_t + gamma R_{t+1}`, seeded with
/// `bootstrap`, and advantages `A_t = R_t - V_t`.
pub fn compute_advantages(rewards: &[f64], values: &[f64], bootstrap: f64, gamma: f64) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(rewards.len(), values.len(), "rewards and values must align");
    let mut returns = vec![0.0; rewards.len()];
    let mut acc = bootstrap;
    for t in (0..rewards.len()).rev() {
        acc = rewards[t] + gamma * acc;
        returns[t] = acc;
    }
    let advantages = returns.iter().zip(values).map(|(r, v)| r - v).collect();
    (returns, advantages)
}

/// Fills `ret` and `advantage` on every step of `traj`.
pub fn attach_returns(traj: &mut Trajectory, gamma: f64) {
    let rewards: Vec<f64> = traj.steps.iter().map(|s| s.reward).collect();
    let values: Vec<f64> = traj.steps.iter().map(|s| s.value).collect();
    let (returns, advantages) = compute_advantages(&rewards, &values, traj.bootstrap, gamma);
    for ((s, r), a) in traj.steps.iter_mut().zip(returns).zip(advantages) {
        s.ret = r;
        s.advantage = a;
    }
}

/// Loss of a recorded trajectory from its stored log-probabilities, entropies and values.
pub fn a2c_loss(traj: &Trajectory, weights: &LossWeights) -> Result<LossBreakdown> {
    let mut loss = LossBreakdown::default();
    for (t, s) in traj.steps.iter().enumerate() {
        if s.action.is_some() {
            loss.policy -= s.log_prob * s.advantage;
            loss.entropy -= s.entropy;
        }
        loss.value += (s.ret - s.value).powi(2);
        if !(loss.policy.is_finite() && loss.value.is_finite() && loss.entropy.is_finite()) {
            return Err(Error::Divergence { step: t, what: "non-finite loss".into() });
        }
    }
    loss.total = weights.policy * loss.policy + weights.value * loss.value + weights.entropy * loss.entropy;
    Ok(loss)
}
