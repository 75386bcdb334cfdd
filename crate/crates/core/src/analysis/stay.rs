use crate::a2c::EpisodeRecord;
use crate::envs::{TaskDist, TransitionKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StayCondition {
    RewardedCommon,
    RewardedRare,
    UnrewardedCommon,
    UnrewardedRare,
}

impl StayCondition {
    pub const ALL: [StayCondition; 4] = [
        StayCondition::RewardedCommon,
        StayCondition::RewardedRare,
        StayCondition::UnrewardedCommon,
        StayCondition::UnrewardedRare,
    ];

    pub fn new(rewarded: bool, transition: TransitionKind) -> Self {
        match (rewarded, transition) {
            (true, TransitionKind::Common) => StayCondition::RewardedCommon,
            (true, TransitionKind::Rare) => StayCondition::RewardedRare,
            (false, TransitionKind::Common) => StayCondition::UnrewardedCommon,
            (false, TransitionKind::Rare) => StayCondition::UnrewardedRare,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            StayCondition::RewardedCommon => "rewarded_common",
            StayCondition::RewardedRare => "rewarded_rare",
            StayCondition::UnrewardedCommon => "unrewarded_common",
            StayCondition::UnrewardedRare => "unrewarded_rare",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

/// Repeat counts of the first-stage action, by the previous trial's outcome.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StayProbTable {
    pub stays: [usize; 4],
    pub counts: [usize; 4],
}

impl StayProbTable {
    /// `P(stay | condition)`; `None` when the condition never occurred.
    pub fn p_stay(&self, c: StayCondition) -> Option<f64> {
        let n = self.counts[c.slot()];
        (n > 0).then(|| self.stays[c.slot()] as f64 / n as f64)
    }

    pub fn count(&self, c: StayCondition) -> usize {
        self.counts[c.slot()]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// `P(stay|rew,common) - P(stay|rew,rare)`
    pub fn rewarded_contrast(&self) -> Option<f64> {
        Some(self.p_stay(StayCondition::RewardedCommon)? - self.p_stay(StayCondition::RewardedRare)?)
    }

    /// `P(stay|unrew,rare) - P(stay|unrew,common)`
    pub fn unrewarded_contrast(&self) -> Option<f64> {
        Some(self.p_stay(StayCondition::UnrewardedRare)? - self.p_stay(StayCondition::UnrewardedCommon)?)
    }
}

/// Per-trial `(first-stage action, transition, rewarded)` of a two-step episode.
fn trials(record: &EpisodeRecord) -> Result<Vec<(usize, TransitionKind, bool)>> {
    let mut out: Vec<(usize, TransitionKind, f64)> = Vec::new();
    for step in &record.steps {
        match step.action {
            Some(a) => {
                let kind = step
                    .transition
                    .ok_or_else(|| Error::InvalidRecord(format!("trial {} has no transition kind", step.trial)))?;
                out.push((a, kind, step.reward));
            }
            None => {
                let last = out.last_mut().ok_or_else(|| Error::InvalidRecord("second-stage step before any decision".into()))?;
                last.2 += step.reward;
            }
        }
    }
    Ok(out.into_iter().map(|(a, k, r)| (a, k, r > 0.0)).collect())
}

/// Tabulates whether each first-stage choice repeats the previous trial's,
/// conditioned on that trial's reward and transition. Pairs never span episodes.
pub fn stay_probabilities(records: &[EpisodeRecord]) -> Result<StayProbTable> {
    let mut table = StayProbTable::default();
    for record in records {
        if record.dist != TaskDist::TwoStep {
            return Err(Error::InvalidRecord(format!("stay analysis needs two-step records, got `{}`", record.dist)));
        }
        let trials = trials(record)?;
        for pair in trials.windows(2) {
            let (prev_action, kind, rewarded) = pair[0];
            let slot = StayCondition::new(rewarded, kind).slot();
            table.counts[slot] += 1;
            if pair[1].0 == prev_action {
                table.stays[slot] += 1;
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::a2c::TrialRecord;
    use crate::envs::{Stage, TaskRecord};
    use rand::Rng as _;

    /// Synthetic agent: `stay(rewarded, kind)` decides whether to repeat.
    fn synthetic(episodes: usize, stay: impl Fn(bool, TransitionKind) -> bool) -> Vec<EpisodeRecord> {
        let mut rng = crate::seeded_rng(17);
        (0..episodes)
            .map(|_| {
                let mut steps = Vec::new();
                let mut action = rng.random_range(0..2);
                for trial in 0..10 {
                    let kind = if rng.random::<f64>() < 0.75 { TransitionKind::Common } else { TransitionKind::Rare };
                    let reward = if rng.random::<bool>() { 1.0 } else { 0.0 };
                    steps.push(TrialRecord { trial, state: 0, action: Some(action), reward: 0.0, transition: Some(kind) });
                    steps.push(TrialRecord { trial, state: 1, action: None, reward, transition: None });
                    if !stay(reward > 0.0, kind) {
                        action = 1 - action;
                    }
                }
                EpisodeRecord { dist: TaskDist::TwoStep, task: TaskRecord::TwoStep { good_state: Stage::S2 }, steps }
            })
            .collect()
    }

    #[test]
    fn model_free_pattern() {
        let t = stay_probabilities(&synthetic(50, |rew, _| rew)).unwrap();
        assert_eq!(t.p_stay(StayCondition::RewardedCommon), Some(1.0));
        assert_eq!(t.p_stay(StayCondition::RewardedRare), Some(1.0));
        assert_eq!(t.p_stay(StayCondition::UnrewardedCommon), Some(0.0));
        assert_eq!(t.p_stay(StayCondition::UnrewardedRare), Some(0.0));
        assert_eq!(t.total(), 50 * 9);
    }

    #[test]
    fn model_based_pattern() {
        let t = stay_probabilities(&synthetic(50, |rew, k| rew == (k == TransitionKind::Common))).unwrap();
        assert_eq!(t.p_stay(StayCondition::RewardedCommon), Some(1.0));
        assert_eq!(t.p_stay(StayCondition::RewardedRare), Some(0.0));
        assert_eq!(t.p_stay(StayCondition::UnrewardedCommon), Some(0.0));
        assert_eq!(t.p_stay(StayCondition::UnrewardedRare), Some(1.0));
        assert_eq!(t.rewarded_contrast(), Some(1.0));
        assert_eq!(t.unrewarded_contrast(), Some(1.0));
    }

    #[test]
    fn single_trial_episodes_are_empty() {
        let mut recs = synthetic(3, |_, _| true);
        for r in &mut recs {
            r.steps.truncate(2);
        }
        let t = stay_probabilities(&recs).unwrap();
        assert_eq!(t, StayProbTable::default());
        assert_eq!(t.p_stay(StayCondition::RewardedCommon), None);
    }

    #[test]
    fn bandit_records_are_rejected() {
        let mut recs = synthetic(1, |_, _| true);
        recs[0].dist = TaskDist::Easy;
        assert!(stay_probabilities(&recs).is_err());
    }
}
