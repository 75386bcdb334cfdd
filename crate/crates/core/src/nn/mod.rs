//! Minimal recurrent-network engine for a single-layer LSTM actor-critic.
//!
//! Gradients are derived by hand for this fixed architecture; there is no
//! general autodiff. All arithmetic is `f64`.

mod bptt;
mod checkpoint;
mod lstm;
mod optim;
mod params;

pub use bptt::{bptt_gradients, trajectory_loss, LossBreakdown};
pub use checkpoint::{load_params, read_params, save_params, write_params};
pub use lstm::{heads, lstm_forward, softmax, softmax_sample, LstmState, StepCache};
pub use optim::{clip_global_norm, OptimizerState, RmsProp};
pub use params::{AgentParams, Gradients, Shape};

/// One agent step as recorded during an unroll.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStep {
    pub input: Vec<f64>,
    /// Recurrent state before this step was taken.
    pub state: LstmState,
    /// `None` when the environment consumed no decision on this step.
    pub action: Option<usize>,
    pub log_prob: f64,
    pub entropy: f64,
    pub value: f64,
    pub reward: f64,
    /// Discounted return target, filled in by [`crate::a2c::attach_returns`].
    pub ret: f64,
    pub advantage: f64,
}

/// A contiguous slice of an episode used for one gradient update.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<TrajectoryStep>,
    /// Critic value of the state following the last step; 0 at episode end.
    pub bootstrap: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn total_reward(&self) -> f64 {
        self.steps.iter().map(|s| s.reward).sum()
    }
}
