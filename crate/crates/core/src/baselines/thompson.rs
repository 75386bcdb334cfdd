use rand_distr::{Beta, Distribution};

use crate::{Error, Result};

/// Per-arm Beta pseudo-counts `(successes + 1, failures + 1)`.
///
/// Counts are real-valued so forgetting can shrink them toward the prior.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaPosterior {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl BetaPosterior {
    /// Beta(1,1) on every arm.
    pub fn uniform(arms: usize) -> Self {
        Self { alpha: vec![1.0; arms], beta: vec![1.0; arms] }
    }

    pub fn num_arms(&self) -> usize {
        self.alpha.len()
    }

    /// Integer `(successes, failures)` of `arm`, when the counts are whole.
    pub fn counts(&self, arm: usize) -> Option<(usize, usize)> {
        let s = self.alpha[arm] - 1.0;
        let f = self.beta[arm] - 1.0;
        (s >= 0.0 && f >= 0.0 && s.fract() == 0.0 && f.fract() == 0.0).then_some((s as usize, f as usize))
    }

    /// `sum (s + f - 2)`
    pub fn total_pulls(&self) -> f64 {
        self.alpha.iter().zip(&self.beta).map(|(a, b)| a + b - 2.0).sum()
    }

    pub fn mean(&self, arm: usize) -> f64 {
        self.alpha[arm] / (self.alpha[arm] + self.beta[arm])
    }

    fn check(&self, arm: usize, reward: f64) -> Result<()> {
        if arm >= self.num_arms() {
            return Err(Error::ArmOutOfRange { arm, arms: self.num_arms() });
        }
        if reward != 0.0 && reward != 1.0 {
            return Err(Error::InvalidRecord(format!("Beta-Bernoulli update needs a binary reward, got {reward}")));
        }
        Ok(())
    }
}

/// Draws one success probability per arm and returns the argmax (lowest index on ties).
pub fn thompson_choose(posterior: &BetaPosterior, rng: &mut crate::Rng) -> usize {
    let mut best = 0;
    let mut best_draw = f64::NEG_INFINITY;
    for (a, (&al, &be)) in posterior.alpha.iter().zip(&posterior.beta).enumerate() {
        let draw = Beta::new(al, be).expect("pseudo-counts are positive").sample(rng);
        if draw > best_draw {
            best = a;
            best_draw = draw;
        }
    }
    best
}

pub fn thompson_update(posterior: &mut BetaPosterior, arm: usize, reward: f64) -> Result<()> {
    posterior.check(arm, reward)?;
    if reward == 1.0 {
        posterior.alpha[arm] += 1.0;
    } else {
        posterior.beta[arm] += 1.0;
    }
    Ok(())
}

/// Shrinks every pseudo-count toward the prior, `c <- 1 + phi (c - 1)`, then applies
/// the standard increment.
pub fn thompson_restless_update(posterior: &mut BetaPosterior, arm: usize, reward: f64, phi: f64) -> Result<()> {
    posterior.check(arm, reward)?;
    if !(0.0..=1.0).contains(&phi) {
        return Err(Error::config(format!("decay {phi} outside [0,1]")));
    }
    for c in posterior.alpha.iter_mut().chain(posterior.beta.iter_mut()) {
        *c = 1.0 + phi * (*c - 1.0);
    }
    thompson_update(posterior, arm, reward)
}
