use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::a2c::{EpisodeRecord, LearningCurve, TrialRecord};
use crate::analysis::{regret_curve, FitResult, StayCondition, StayProbTable};
use crate::envs::{informative_task, BanditTask, Regime, Stage, TaskDist, TaskRecord, TransitionKind};
use crate::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct EpisodeRow {
    episode: usize,
    trial: usize,
    state: usize,
    action: Option<usize>,
    reward: f64,
    optimal_arm: usize,
    p1: Option<f64>,
    transition_kind: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TaskRow {
    episode: usize,
    dist: TaskDist,
    task: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RegretRow {
    pub agent: String,
    pub dist_train: String,
    pub dist_test: TaskDist,
    pub episode: usize,
    pub trial: usize,
    pub regret: f64,
    pub cumregret: f64,
}

fn task_text(task: &TaskRecord) -> String {
    match task {
        TaskRecord::Bandit(b) => match (b.target, b.probs()) {
            (Some(t), _) => format!("target={t}"),
            (None, Some(p)) => p.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" "),
            (None, None) => String::new(),
        },
        TaskRecord::Restless { regime, .. } => format!("regime={}", regime.label()),
        TaskRecord::TwoStep { good_state } => format!("good={}", if *good_state == Stage::S2 { "S2" } else { "S3" }),
    }
}

fn bad(what: String) -> Error {
    Error::InvalidRecord(what)
}

fn parse_task(dist: TaskDist, text: &str, p1: Vec<f64>) -> Result<TaskRecord> {
    let field = |key: &str| text.strip_prefix(key).ok_or_else(|| bad(format!("task `{text}` lacks `{key}`")));
    Ok(match dist {
        TaskDist::Informative => {
            let t: usize = field("target=")?.parse().map_err(|_| bad(format!("bad target in `{text}`")))?;
            TaskRecord::Bandit(informative_task(t))
        }
        TaskDist::Restless => {
            let regime = match field("regime=")? {
                "low" => Regime::Low,
                "high" => Regime::High,
                other => return Err(bad(format!("unknown regime `{other}`"))),
            };
            TaskRecord::Restless { p1, regime }
        }
        TaskDist::TwoStep => {
            let good_state = match field("good=")? {
                "S2" => Stage::S2,
                "S3" => Stage::S3,
                other => return Err(bad(format!("unknown second-stage state `{other}`"))),
            };
            TaskRecord::TwoStep { good_state }
        }
        d => {
            let probs = text
                .split_whitespace()
                .map(|x| x.parse::<f64>().map_err(|_| bad(format!("bad probability in `{text}`"))))
                .collect::<Result<Vec<_>>>()?;
            TaskRecord::Bandit(BanditTask::bernoulli(d, probs))
        }
    })
}

/// Writes `episodes.csv` (one row per timestep) and `tasks.csv` (one row per episode).
pub fn write_episodes(dir: &Path, records: &[EpisodeRecord]) -> Result<()> {
    let mut steps = csv::Writer::from_path(dir.join("episodes.csv"))?;
    let mut tasks = csv::Writer::from_path(dir.join("tasks.csv"))?;
    for (episode, rec) in records.iter().enumerate() {
        tasks.serialize(TaskRow { episode, dist: rec.dist, task: task_text(&rec.task) })?;
        for s in &rec.steps {
            let p1 = match &rec.task {
                TaskRecord::Restless { p1, .. } => p1.get(s.trial).copied(),
                _ => None,
            };
            steps.serialize(EpisodeRow {
                episode,
                trial: s.trial,
                state: s.state,
                action: s.action,
                reward: s.reward,
                optimal_arm: rec.task.optimal_arm(s.trial)?,
                p1,
                transition_kind: s.transition.map(|k| k.label().to_string()),
            })?;
        }
    }
    steps.flush()?;
    tasks.flush()?;
    Ok(())
}

/// Reads back what [`write_episodes`] wrote.
pub fn read_episodes(dir: &Path) -> Result<Vec<EpisodeRecord>> {
    let mut tasks: Vec<TaskRow> = Vec::new();
    for row in csv::Reader::from_path(dir.join("tasks.csv"))?.deserialize() {
        tasks.push(row?);
    }
    let mut steps: BTreeMap<usize, Vec<EpisodeRow>> = BTreeMap::new();
    for row in csv::Reader::from_path(dir.join("episodes.csv"))?.deserialize() {
        let row: EpisodeRow = row?;
        steps.entry(row.episode).or_default().push(row);
    }
    tasks
        .into_iter()
        .map(|t| {
            let rows = steps.remove(&t.episode).unwrap_or_default();
            let mut p1 = Vec::new();
            let mut out = Vec::with_capacity(rows.len());
            for r in rows {
                if let Some(p) = r.p1 {
                    if p1.len() == r.trial {
                        p1.push(p);
                    }
                }
                let transition = match r.transition_kind.as_deref() {
                    None | Some("") => None,
                    Some("common") => Some(TransitionKind::Common),
                    Some("rare") => Some(TransitionKind::Rare),
                    Some(other) => return Err(bad(format!("unknown transition kind `{other}`"))),
                };
                out.push(TrialRecord { trial: r.trial, state: r.state, action: r.action, reward: r.reward, transition });
            }
            Ok(EpisodeRecord { dist: t.dist, task: parse_task(t.dist, &t.task, p1)?, steps: out })
        })
        .collect()
}

/// Appends one agent's regret rows; `first_episode` offsets the episode index.
pub fn regret_rows(agent: &str, dist_train: &str, records: &[EpisodeRecord], first_episode: usize) -> Result<Vec<RegretRow>> {
    let mut rows = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        let report = regret_curve(rec)?;
        for (trial, (&regret, &cum)) in report.increments.iter().zip(&report.cumulative).enumerate() {
            rows.push(RegretRow {
                agent: agent.to_string(),
                dist_train: dist_train.to_string(),
                dist_test: rec.dist,
                episode: first_episode + i,
                trial,
                regret,
                cumregret: cum,
            });
        }
    }
    Ok(rows)
}

pub fn write_regret(path: &Path, rows: &[RegretRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_regret(path: &Path) -> Result<Vec<RegretRow>> {
    csv::Reader::from_path(path)?.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn write_curve(path: &Path, curve: &LearningCurve) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["episode", "total_reward", "beta_e", "loss_policy", "loss_value", "loss_entropy"])?;
    for p in curve {
        w.write_record([
            p.episode.to_string(),
            format!("{:?}", p.total_reward),
            format!("{:?}", p.beta_e),
            format!("{:?}", p.loss_policy),
            format!("{:?}", p.loss_value),
            format!("{:?}", p.loss_entropy),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_stay(path: &Path, table: &StayProbTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["condition", "p_stay", "n"])?;
    for c in StayCondition::ALL {
        let p = table.p_stay(c).map(|p| format!("{p:?}")).unwrap_or_default();
        w.write_record([c.label().to_string(), p, table.count(c).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_fits(path: &Path, fits: &[FitResult]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["block", "volatility", "model", "alpha", "beta", "eps", "loglik", "bic"])?;
    for f in fits {
        w.write_record([
            f.block.to_string(),
            f.volatility.map(|r| r.label().to_string()).unwrap_or_default(),
            f.model.tag().to_string(),
            format!("{:?}", f.alpha),
            format!("{:?}", f.beta),
            format!("{:?}", f.epsilon),
            format!("{:?}", f.loglik),
            format!("{:?}", f.bic),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{play_episode, UcbPolicy};
    use crate::envs::EnvSettings;

    #[test]
    fn episodes_round_trip_for_every_family() {
        let dir = tempfile::tempdir().unwrap();
        let mut rng = crate::seeded_rng(2);
        let mut records = Vec::new();
        for dist in TaskDist::ALL {
            let trials = match dist {
                TaskDist::Informative => 5,
                TaskDist::TwoStep => 4,
                _ => 12,
            };
            let settings = EnvSettings { trials, ..Default::default() };
            let mut env = dist.sample_env(&settings, &mut rng);
            if dist == TaskDist::TwoStep {
                let steps: Vec<TrialRecord> = (0..4)
                    .flat_map(|t| {
                        [
                            TrialRecord {
                                trial: t,
                                state: 0,
                                action: Some(t % 2),
                                reward: 0.0,
                                transition: Some(TransitionKind::Rare),
                            },
                            TrialRecord { trial: t, state: 2, action: None, reward: 1.0, transition: None },
                        ]
                    })
                    .collect();
                records.push(EpisodeRecord { dist, task: env.task(), steps });
            } else {
                records.push(play_episode(&mut UcbPolicy::new(1.0), env.as_mut(), &mut rng).unwrap());
            }
        }
        write_episodes(dir.path(), &records).unwrap();
        assert_eq!(read_episodes(dir.path()).unwrap(), records);
    }
}
