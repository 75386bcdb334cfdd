use std::fs;
use std::path::Path;

use super::config::ExperimentConfig;
use super::records::{regret_rows, write_regret};
use super::run::{agent_episodes, derive_seed, episode_regrets, train_agent, write_manifest, Seeds};
use crate::a2c::{Hyperparams, InputFlags};
use crate::analysis::{mean_and_se, regret_curve, suboptimal_rate};
use crate::envs::TaskDist;
use crate::nn::AgentParams;
use crate::{Error, Result};

/// Mean and standard error of `R_T` for every (train, test) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossMatrix {
    pub train: Vec<TaskDist>,
    pub test: Vec<TaskDist>,
    /// `regret[i][j]`: `R_T` per report episode of the agent trained on
    /// `train[i]` and tested on `test[j]`. Episodes are shared down each column.
    pub regret: Vec<Vec<Vec<f64>>>,
}

impl CrossMatrix {
    pub fn index(&self, train: TaskDist, test: TaskDist) -> Result<(usize, usize)> {
        let i = self.train.iter().position(|&d| d == train);
        let j = self.test.iter().position(|&d| d == test);
        i.zip(j).ok_or_else(|| Error::config(format!("matrix has no cell for `{train}` -> `{test}`")))
    }

    pub fn episodes(&self, train: TaskDist, test: TaskDist) -> Result<&[f64]> {
        let (i, j) = self.index(train, test)?;
        Ok(&self.regret[i][j])
    }

    /// `(mean, se)` of one cell.
    pub fn cell(&self, train: TaskDist, test: TaskDist) -> Result<(f64, f64)> {
        Ok(mean_and_se(self.episodes(train, test)?))
    }
}

/// Networks trained per training distribution; the matrix keeps the one with
/// the lowest selection-episode regret on its own distribution.
pub const MATRIX_CANDIDATES: usize = 5;

/// Directory holding the candidate networks trained on `dist` under `out`.
pub fn matrix_agent_dir(out: &Path, dist: TaskDist) -> std::path::PathBuf {
    out.join(format!("train_{}", dist.tag()))
}

/// Trains (or, with `reuse`, reloads) [`MATRIX_CANDIDATES`] agents per
/// training distribution, keeps the best on selection episodes, then evaluates every agent on every test distribution. All agents meet the
/// same report episodes of a given test distribution.
pub fn cross_matrix(
    config: &ExperimentConfig,
    train: &[TaskDist],
    test: &[TaskDist],
    out: &Path,
    reuse: bool,
) -> Result<CrossMatrix> {
    config.validate()?;
    fs::create_dir_all(out)?;
    let seeds = Seeds::new(config.seed);
    let mut agents: Vec<AgentParams> = Vec::with_capacity(train.len());
    let mut selected = Vec::with_capacity(train.len());
    for &d in train {
        if !d.is_stationary_bernoulli() {
            return Err(Error::config(format!("the cross matrix covers two-armed Bernoulli families, not `{d}`")));
        }
        let mut best: Option<(f64, AgentParams)> = None;
        let mut picks = Vec::with_capacity(MATRIX_CANDIDATES);
        for k in 0..MATRIX_CANDIDATES {
            let seed = derive_seed(derive_seed(seeds.train, d as u64), k as u64);
            let dir = matrix_agent_dir(out, d).join(format!("seed_{k}"));
            let params = train_agent(&config.a2c, d, &config.env, seed, &dir, reuse)?.0;
            let selection =
                agent_episodes(&params, &config.a2c, d, &config.env, config.eval.selection_episodes, seeds.selection)?;
            let metric = mean_and_se(&episode_regrets(&selection)?).0;
            picks.push(metric);
            if best.as_ref().is_none_or(|(m, _)| metric < *m) {
                best = Some((metric, params));
            }
        }
        selected.push(picks);
        agents.push(best.map(|(_, p)| p).ok_or_else(|| Error::config("no matrix candidates"))?);
    }

    let mut picks = csv::Writer::from_path(out.join("selection.csv"))?;
    picks.write_record(["dist_train", "candidate", "selection_regret"])?;
    for (d, metrics) in train.iter().zip(&selected) {
        for (k, m) in metrics.iter().enumerate() {
            picks.write_record([d.tag().to_string(), k.to_string(), format!("{m:?}")])?;
        }
    }
    picks.flush()?;

    let mut regret = vec![vec![Vec::new(); test.len()]; train.len()];
    let mut rows = Vec::new();
    let mut table = csv::Writer::from_path(out.join("matrix.csv"))?;
    table.write_record(["dist_train", "dist_test", "mean_regret", "se", "episodes"])?;
    for (i, (&dtrain, params)) in train.iter().zip(&agents).enumerate() {
        for (j, &dtest) in test.iter().enumerate() {
            if !dtest.is_stationary_bernoulli() {
                return Err(Error::config(format!("the cross matrix covers two-armed Bernoulli families, not `{dtest}`")));
            }
            let seed = derive_seed(seeds.report, dtest as u64);
            let records = agent_episodes(params, &config.a2c, dtest, &config.env, config.eval.report_episodes, seed)?;
            regret[i][j] = episode_regrets(&records)?;
            let (m, se) = mean_and_se(&regret[i][j]);
            table.write_record([
                dtrain.tag().to_string(),
                dtest.tag().to_string(),
                format!("{m:?}"),
                format!("{se:?}"),
                records.len().to_string(),
            ])?;
            rows.extend(regret_rows("agent", dtrain.tag(), &records, 0)?);
        }
    }
    table.flush()?;
    write_regret(&out.join("regret.csv"), &rows)?;
    write_manifest(out, "matrix", config, &["matrix.csv", "selection.csv", "regret.csv"])?;
    Ok(CrossMatrix { train: train.to_vec(), test: test.to_vec(), regret })
}

/// Outcome of one arm of the ablation.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationArm {
    pub inputs: InputFlags,
    /// Mean cumulative-regret curve on the report episodes.
    pub curve: Vec<f64>,
    /// `R_T` per report episode.
    pub regret: Vec<f64>,
    /// Fraction of suboptimal pulls per report episode.
    pub suboptimal: Vec<f64>,
}

impl AblationArm {
    pub fn suboptimal_rate(&self) -> (f64, f64) {
        mean_and_se(&self.suboptimal)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationReport {
    pub with_reward: AblationArm,
    pub without_reward: AblationArm,
}

/// Trains twin agents from the same seed, one with and one without the reward
/// input (with `enabled` false both keep it), and evaluates both on the same
/// report episodes of `config.dist_test`.
pub fn ablate_reward_input(config: &ExperimentConfig, out: &Path, enabled: bool, reuse: bool) -> Result<AblationReport> {
    config.validate()?;
    fs::create_dir_all(out)?;
    let seeds = Seeds::new(config.seed);
    let arm = |inputs: InputFlags, name: &str| -> Result<AblationArm> {
        let hp = Hyperparams { inputs, ..config.a2c.clone() };
        let (params, _) = train_agent(&hp, config.dist_train, &config.env, seeds.train, &out.join(name), reuse)?;
        let records = agent_episodes(&params, &hp, config.dist_test, &config.env, config.eval.report_episodes, seeds.report)?;
        let reports = records.iter().map(regret_curve).collect::<Result<Vec<_>>>()?;
        write_regret(&out.join(name).join("regret.csv"), &regret_rows(name, config.dist_train.tag(), &records, 0)?)?;
        Ok(AblationArm {
            inputs,
            curve: super::run::regret_mean_curve(&records)?,
            regret: episode_regrets(&records)?,
            suboptimal: suboptimal_rate(&reports),
        })
    };
    let full = config.a2c.inputs;
    let ablated = InputFlags { reward: !enabled && full.reward, ..full };
    let report = AblationReport { with_reward: arm(full, "with_reward")?, without_reward: arm(ablated, "without_reward")? };

    let mut w = csv::Writer::from_path(out.join("ablation.csv"))?;
    w.write_record(["agent", "mean_regret", "se", "suboptimal_rate", "suboptimal_se"])?;
    for (name, a) in [("with_reward", &report.with_reward), ("without_reward", &report.without_reward)] {
        let (m, se) = mean_and_se(&a.regret);
        let (s, sse) = a.suboptimal_rate();
        w.write_record([name.to_string(), format!("{m:?}"), format!("{se:?}"), format!("{s:?}"), format!("{sse:?}")])?;
    }
    w.flush()?;
    write_manifest(out, "ablate", config, &["ablation.csv", "with_reward/", "without_reward/"])?;
    Ok(report)
}
