use super::{anneal_beta_e, input_width, run_episode, Hyperparams, LossWeights, Mode};
use crate::envs::{EnvSettings, TaskDist};
use crate::nn::{bptt_gradients, AgentParams, OptimizerState};
use crate::{Error, Result};

/// Per-episode training statistics; losses are summed over the episode's trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub episode: usize,
    pub total_reward: f64,
    pub beta_e: f64,
    pub loss_policy: f64,
    pub loss_value: f64,
    pub loss_entropy: f64,
}

pub type LearningCurve = Vec<CurvePoint>;

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub params: AgentParams,
    pub curve: LearningCurve,
}

/// Initialises a network sized for `dist` and trains it for `hp.episodes` episodes.
pub fn train(hp: &Hyperparams, dist: TaskDist, settings: &EnvSettings, rng: &mut crate::Rng) -> Result<TrainOutput> {
    hp.validate()?;
    let width = input_width(&hp.inputs, dist.observation_size(), dist.num_actions(), dist.reward_encoding());
    let params = AgentParams::init(hp.hidden, width, dist.num_actions(), rng);
    train_from(params, hp, dist, settings, rng)
}

/// Trains `params` in place of a fresh initialisation.
///
/// Each episode is rolled out with the current weights; every trajectory's
/// gradient is computed at those acting weights, then applied in order.
pub fn train_from(
    mut params: AgentParams,
    hp: &Hyperparams,
    dist: TaskDist,
    settings: &EnvSettings,
    rng: &mut crate::Rng,
) -> Result<TrainOutput> {
    hp.validate()?;
    let mut opt = OptimizerState::new(&params, hp.optimizer());
    let mut curve = Vec::with_capacity(hp.episodes);
    for episode in 0..hp.episodes {
        let beta_e = anneal_beta_e(episode, hp.episodes, &hp.entropy);
        let weights = LossWeights::new(hp.value_coef, beta_e);
        let mut env = dist.sample_env(settings, rng);
        let (record, trajectories) = run_episode(&params, env.as_mut(), hp, rng, Mode::Train)?;

        let mut point = CurvePoint {
            episode,
            total_reward: record.total_reward(),
            beta_e,
            loss_policy: 0.0,
            loss_value: 0.0,
            loss_entropy: 0.0,
        };
        let mut updates = Vec::with_capacity(trajectories.len());
        for traj in &trajectories {
            let (grads, loss) = bptt_gradients(&params, traj, &weights).map_err(|e| at_episode(e, episode))?;
            point.loss_policy += loss.policy;
            point.loss_value += loss.value;
            point.loss_entropy += loss.entropy;
            updates.push(grads);
        }
        if hp.learning_rate > 0.0 {
            for mut grads in updates {
                opt.step(&mut params, &mut grads, hp.learning_rate).map_err(|e| at_episode(e, episode))?;
            }
        }
        curve.push(point);
    }
    Ok(TrainOutput { params, curve })
}

fn at_episode(err: Error, episode: usize) -> Error {
    match err {
        Error::Divergence { step, what } => Error::Divergence { step, what: format!("episode {episode}: {what}") },
        other => other,
    }
}
