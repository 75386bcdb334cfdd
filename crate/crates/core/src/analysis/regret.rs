use crate::a2c::EpisodeRecord;
use crate::envs::optimal_expected_reward;
use crate::{Error, Result};

/// Expected regret of one episode, trial by trial.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretReport {
    /// `mu*(t) - mu_{a_t}(t)`
    pub increments: Vec<f64>,
    /// Running sum of `increments`; the last entry is `R_T`.
    pub cumulative: Vec<f64>,
    /// Whether the chosen arm was worse than the best available.
    pub suboptimal: Vec<bool>,
}

impl RegretReport {
    /// `R_T` for the full episode.
    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Cumulative regret after the first `t` trials.
    pub fn at(&self, t: usize) -> f64 {
        if t == 0 {
            0.0
        } else {
            self.cumulative[t.min(self.cumulative.len()) - 1]
        }
    }

    pub fn suboptimal_pulls(&self) -> usize {
        self.suboptimal.iter().filter(|&&s| s).count()
    }
}

/// Computes expected (not realised) regret from the task's arm means, indexing
/// time-varying tasks by trial.
pub fn regret_curve(record: &EpisodeRecord) -> Result<RegretReport> {
    let mut increments = Vec::new();
    let mut suboptimal = Vec::new();
    for (expected_trial, (trial, arm)) in record.choices().enumerate() {
        if trial != expected_trial {
            return Err(Error::InvalidRecord(format!("decision {expected_trial} is labelled trial {trial}")));
        }
        let best = optimal_expected_reward(&record.task, trial)?;
        let chosen = record.task.mean(arm, trial)?;
        let gap = (best - chosen).max(0.0);
        increments.push(gap);
        suboptimal.push(gap > 0.0);
    }
    let cumulative = increments
        .iter()
        .scan(0.0, |acc, g| {
            *acc += g;
            Some(*acc)
        })
        .collect();
    Ok(RegretReport { increments, cumulative, suboptimal })
}

/// Trial-wise mean of several cumulative curves of equal length.
pub fn mean_curve(curves: &[Vec<f64>]) -> Vec<f64> {
    let Some(len) = curves.iter().map(Vec::len).min() else {
        return Vec::new();
    };
    (0..len).map(|t| curves.iter().map(|c| c[t]).sum::<f64>() / curves.len() as f64).collect()
}

/// Fraction of suboptimal pulls within each report.
pub fn suboptimal_rate(reports: &[RegretReport]) -> Vec<f64> {
    reports.iter().map(|r| r.suboptimal_pulls() as f64 / r.suboptimal.len().max(1) as f64).collect()
}
