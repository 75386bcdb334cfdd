//! Recurrent meta-reinforcement learning at desk scale.
//!
//! An LSTM actor-critic is trained with advantage actor-critic across a
//! distribution of tasks, then evaluated with frozen weights so that all
//! within-episode adaptation comes from its recurrent dynamics. The crate
//! bundles everything needed to train and study such agents:
//!
//! - [`nn`]: a hand-differentiated LSTM with policy/value heads, BPTT and RMSProp.
//! - [`a2c`]: returns, advantages, the composite loss, episode loop and trainer.
//! - [`envs`]: Bernoulli bandit families, the informative bandit, restless
//!   bandits and the two-step task.
//! - [`baselines`]: finite-horizon Bayes-optimal planner, UCB, Thompson sampling
//!   and a Rescorla-Wagner learner.
//! - [`analysis`]: regret curves, top-k aggregation, stay probabilities and
//!   maximum-likelihood Rescorla-Wagner fits with BIC.
//! - [`harness`]: experiment configs, sweeps, the train/test cross matrix,
//!   ablations and result persistence.
//!
//! See the crate's `examples/` directory for one runnable program per capability.

pub mod a2c;
pub mod analysis;
pub mod baselines;
pub mod envs;
pub mod error;
pub mod harness;
pub mod nn;

pub use error::{Error, Result};

/// Seeded generator used everywhere. ChaCha keeps streams stable across platforms.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Builds the crate's generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}
