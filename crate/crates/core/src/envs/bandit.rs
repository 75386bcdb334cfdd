use rand::Rng as _;

use super::{Environment, RewardEncoding, StepOutcome, TaskDist, TaskRecord};
use crate::{Error, Result};

/// Arm count of the informative bandit: ten candidate targets plus one informative arm.
pub const INFORMATIVE_ARMS: usize = 11;
pub const INFORMATIVE_TRIALS: usize = 5;
const TARGET_REWARD: f64 = 5.0;
const NON_TARGET_REWARD: f64 = 1.0;

/// Distinct reward levels of the informative bandit, in one-hot order.
/// The informative arm's `1.0` (target 10) and a non-target's `1` share a slot.
pub const INFORMATIVE_LEVELS: [f64; 11] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 5.0];

/// Slot of `reward` in [`INFORMATIVE_LEVELS`].
pub fn reward_level(reward: f64) -> Option<usize> {
    INFORMATIVE_LEVELS.iter().position(|&l| (l - reward).abs() < 1e-9)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArmModel {
    /// Pays 1 with probability `p`, else 0.
    Bernoulli(f64),
    Fixed(f64),
}

impl ArmModel {
    pub fn mean(self) -> f64 {
        match self {
            ArmModel::Bernoulli(p) | ArmModel::Fixed(p) => p,
        }
    }
}

/// A sampled bandit instance.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditTask {
    pub dist: TaskDist,
    pub arms: Vec<ArmModel>,
    /// Target arm of the informative bandit.
    pub target: Option<usize>,
}

impl BanditTask {
    pub fn bernoulli(dist: TaskDist, probs: Vec<f64>) -> Self {
        Self { dist, arms: probs.into_iter().map(ArmModel::Bernoulli).collect(), target: None }
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn mean(&self, arm: usize) -> f64 {
        self.arms[arm].mean()
    }

    /// `mu*`
    pub fn optimal_value(&self) -> f64 {
        self.arms.iter().map(|a| a.mean()).fold(f64::NEG_INFINITY, f64::max)
    }

    /// All arms attaining `mu*`.
    pub fn optimal_arms(&self) -> Vec<usize> {
        let best = self.optimal_value();
        (0..self.num_arms()).filter(|&a| self.mean(a) == best).collect()
    }

    /// Bernoulli success probabilities, if every arm is Bernoulli.
    pub fn probs(&self) -> Option<Vec<f64>> {
        self.arms
            .iter()
            .map(|a| match a {
                ArmModel::Bernoulli(p) => Some(*p),
                ArmModel::Fixed(_) => None,
            })
            .collect()
    }
}

/// Samples a stationary task from `dist`.
pub fn sample_task(dist: TaskDist, rng: &mut crate::Rng) -> Result<BanditTask> {
    let pair = |p1: f64| vec![p1, 1.0 - p1];
    let pick = |rng: &mut crate::Rng, lo: f64, hi: f64| if rng.random::<bool>() { lo } else { hi };
    let probs = match dist {
        TaskDist::Independent => vec![rng.random::<f64>(), rng.random::<f64>()],
        TaskDist::Uniform => pair(rng.random::<f64>()),
        TaskDist::Easy => pair(pick(rng, 0.1, 0.9)),
        TaskDist::Medium => pair(pick(rng, 0.25, 0.75)),
        TaskDist::Hard => pair(pick(rng, 0.4, 0.6)),
        TaskDist::Informative => return Ok(sample_informative_task(rng)),
        other => {
            return Err(Error::config(format!("`{other}` is not a stationary bandit distribution")));
        }
    };
    Ok(BanditTask::bernoulli(dist, probs))
}

/// Eleven deterministic arms: a random target among the first ten pays 5, the
/// other nine pay 1, and the last arm pays a tenth of the target's 1-based index.
pub fn sample_informative_task(rng: &mut crate::Rng) -> BanditTask {
    informative_task(rng.random_range(0..INFORMATIVE_ARMS - 1))
}

/// The informative bandit with a given 0-based target arm.
pub fn informative_task(target: usize) -> BanditTask {
    assert!(target < INFORMATIVE_ARMS - 1, "target arm {target} out of range");
    let mut arms: Vec<ArmModel> =
        (0..INFORMATIVE_ARMS - 1).map(|a| ArmModel::Fixed(if a == target { TARGET_REWARD } else { NON_TARGET_REWARD })).collect();
    arms.push(ArmModel::Fixed((target + 1) as f64 / 10.0));
    BanditTask { dist: TaskDist::Informative, arms, target: Some(target) }
}

/// Draws one reward from `arm`.
pub fn pull(task: &BanditTask, arm: usize, rng: &mut crate::Rng) -> Result<f64> {
    let model = task.arms.get(arm).ok_or(Error::ArmOutOfRange { arm, arms: task.num_arms() })?;
    Ok(match *model {
        ArmModel::Bernoulli(p) => {
            if rng.random::<f64>() < p {
                1.0
            } else {
                0.0
            }
        }
        ArmModel::Fixed(v) => v,
    })
}

/// Stationary bandit played for a fixed number of trials.
#[derive(Debug, Clone)]
pub struct BanditEnv {
    pub task: BanditTask,
    trials: usize,
    t: usize,
}

impl BanditEnv {
    pub fn new(task: BanditTask, trials: usize) -> Self {
        Self { task, trials, t: 0 }
    }
}

impl Environment for BanditEnv {
    fn num_actions(&self) -> usize {
        self.task.num_arms()
    }

    fn observation_size(&self) -> usize {
        0
    }

    fn episode_len(&self) -> usize {
        self.trials
    }

    fn reward_encoding(&self) -> RewardEncoding {
        if self.task.dist == TaskDist::Informative {
            RewardEncoding::InformativeLevels
        } else {
            RewardEncoding::Scalar
        }
    }

    fn observation(&self) -> Vec<f64> {
        Vec::new()
    }

    fn trial(&self) -> usize {
        self.t
    }

    fn step(&mut self, action: Option<usize>, rng: &mut crate::Rng) -> Result<StepOutcome> {
        let arm = action.ok_or_else(|| Error::InvalidAction("bandit step requires an arm".into()))?;
        let reward = pull(&self.task, arm, rng)?;
        self.t += 1;
        Ok(StepOutcome { reward, done: self.t >= self.trials })
    }

    fn task(&self) -> TaskRecord {
        TaskRecord::Bandit(self.task.clone())
    }

    fn dist(&self) -> TaskDist {
        self.task.dist
    }
}
