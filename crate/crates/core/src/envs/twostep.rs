use rand::Rng as _;

use super::{Environment, StepOutcome, TaskDist, TaskRecord};
use crate::{Error, Result};

pub(crate) const COMMON_PROB: f64 = 0.75;
pub(crate) const REWARD_HIGH: f64 = 0.9;
pub(crate) const REWARD_LOW: f64 = 0.1;
pub const TWO_STEP_TRIALS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    S1,
    S2,
    S3,
}

impl Stage {
    pub fn index(self) -> usize {
        match self {
            Stage::S1 => 0,
            Stage::S2 => 1,
            Stage::S3 => 2,
        }
    }

    pub fn one_hot(self) -> Vec<f64> {
        let mut v = vec![0.0; 3];
        v[self.index()] = 1.0;
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransitionKind {
    Common,
    Rare,
}

impl TransitionKind {
    pub fn label(self) -> &'static str {
        match self {
            TransitionKind::Common => "common",
            TransitionKind::Rare => "rare",
        }
    }
}

/// Three-state decision problem: `a1` leads to `S2` w.p. 0.75 (else `S3`), `a2` mirrors it.
/// One second-stage state pays 1 w.p. 0.9, the other w.p. 0.1.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStepMdp {
    pub good_state: Stage,
    pub current: Stage,
    pub trial: usize,
}

impl TwoStepMdp {
    pub fn reward_prob(&self, stage: Stage) -> f64 {
        match stage {
            Stage::S1 => 0.0,
            s if s == self.good_state => REWARD_HIGH,
            _ => REWARD_LOW,
        }
    }

    /// Row `action` of the first-stage transition matrix over `(S2, S3)`.
    pub fn transition_row(action: usize) -> [f64; 2] {
        if action == 0 {
            [COMMON_PROB, 1.0 - COMMON_PROB]
        } else {
            [1.0 - COMMON_PROB, COMMON_PROB]
        }
    }
}

/// New episode with the high-reward state drawn uniformly from `{S2, S3}`.
pub fn two_step_reset(rng: &mut crate::Rng) -> TwoStepMdp {
    let good_state = if rng.random::<bool>() { Stage::S2 } else { Stage::S3 };
    TwoStepMdp { good_state, current: Stage::S1, trial: 0 }
}

/// Plays one trial from `S1`: samples the transition and the second-stage reward,
/// then returns the MDP to `S1`. Returns the visited second-stage state.
pub fn two_step_act(mdp: &mut TwoStepMdp, action: usize, rng: &mut crate::Rng) -> Result<(Stage, f64, TransitionKind)> {
    if mdp.current != Stage::S1 {
        return Err(Error::InvalidAction(format!("action taken at second-stage state {:?}", mdp.current)));
    }
    if action > 1 {
        return Err(Error::ArmOutOfRange { arm: action, arms: 2 });
    }
    let common = rng.random::<f64>() < COMMON_PROB;
    let common_state = if action == 0 { Stage::S2 } else { Stage::S3 };
    let rare_state = if action == 0 { Stage::S3 } else { Stage::S2 };
    let (next, kind) = if common { (common_state, TransitionKind::Common) } else { (rare_state, TransitionKind::Rare) };
    let reward = if rng.random::<f64>() < mdp.reward_prob(next) { 1.0 } else { 0.0 };
    mdp.current = Stage::S1;
    mdp.trial += 1;
    Ok((next, reward, kind))
}

/// Two timesteps per trial: a decision at `S1`, then a step at the visited
/// second-stage state that consumes no action and delivers the reward.
#[derive(Debug, Clone)]
pub struct TwoStepEnv {
    mdp: TwoStepMdp,
    trials: usize,
    trial: usize,
    pending: Option<(Stage, f64)>,
    last_transition: Option<TransitionKind>,
}

impl TwoStepEnv {
    pub fn new(mdp: TwoStepMdp, trials: usize) -> Self {
        Self { mdp, trials, trial: 0, pending: None, last_transition: None }
    }

    pub fn mdp(&self) -> &TwoStepMdp {
        &self.mdp
    }

    fn displayed(&self) -> Stage {
        self.pending.map_or(Stage::S1, |(s, _)| s)
    }
}

impl Environment for TwoStepEnv {
    fn num_actions(&self) -> usize {
        2
    }

    fn observation_size(&self) -> usize {
        3
    }

    fn episode_len(&self) -> usize {
        2 * self.trials
    }

    fn observation(&self) -> Vec<f64> {
        self.displayed().one_hot()
    }

    fn needs_action(&self) -> bool {
        self.pending.is_none()
    }

    fn trial(&self) -> usize {
        self.trial
    }

    fn state_index(&self) -> usize {
        self.displayed().index()
    }

    fn last_transition(&self) -> Option<TransitionKind> {
        self.last_transition
    }

    fn step(&mut self, action: Option<usize>, rng: &mut crate::Rng) -> Result<StepOutcome> {
        match (self.pending.take(), action) {
            (None, Some(a)) => {
                let (stage, reward, kind) = two_step_act(&mut self.mdp, a, rng)?;
                self.pending = Some((stage, reward));
                self.last_transition = Some(kind);
                Ok(StepOutcome { reward: 0.0, done: false })
            }
            (Some((stage, _)), Some(_)) => {
                self.pending = Some((stage, 0.0));
                Err(Error::InvalidAction(format!("action taken at second-stage state {stage:?}")))
            }
            (Some((_, reward)), None) => {
                self.trial += 1;
                Ok(StepOutcome { reward, done: self.trial >= self.trials })
            }
            (None, None) => Err(Error::InvalidAction("first-stage step requires an action".into())),
        }
    }

    fn task(&self) -> TaskRecord {
        TaskRecord::TwoStep { good_state: self.mdp.good_state }
    }

    fn dist(&self) -> TaskDist {
        TaskDist::TwoStep
    }
}
