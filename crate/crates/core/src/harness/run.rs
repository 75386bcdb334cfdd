use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use super::config::{EvalProtocol, ExperimentConfig};
use super::records::{regret_rows, write_curve, write_episodes, write_fits, write_regret, write_stay};
use crate::a2c::{run_episode, train, EpisodeRecord, Hyperparams, LearningCurve, Mode};
use crate::analysis::{
    fit_rw, informative_strategy_rate, mean_and_se, mean_curve, regret_curve, stay_probabilities, volatility_comparison,
    FitResult, RwModel, StayProbTable, VolatilityReport,
};
use crate::baselines::{play_episode, BanditPolicy, GittinsPolicy, GittinsTable, RwPolicy, ThompsonPolicy, UcbPolicy};
use crate::envs::{EnvSettings, Regime, TaskDist, TaskRecord};
use crate::nn::{load_params, save_params, AgentParams};
use crate::{Error, Result};

/// Version tag written into every manifest.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Episodes per Rescorla-Wagner fitting block.
pub const BLOCK_EPISODES: usize = 10;

/// The fixed-rate Rescorla-Wagner learner used as the restless control.
pub const RW_CONTROL: BaselineKind = BaselineKind::RescorlaWagner { alpha: 0.5, beta: 8.0, epsilon: 0.0 };

/// Independent seed streams derived from one base seed.
pub mod stream {
    pub const TRAIN: u64 = 1;
    pub const SELECTION: u64 = 2;
    pub const REPORT: u64 = 3;
    pub const SWEEP: u64 = 4;
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sub-stream `stream` of `base`.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    splitmix(splitmix(base) ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Seeds of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Seeds {
    #[serde(with = "super::config::seed_format")]
    pub base: u64,
    #[serde(with = "super::config::seed_format")]
    pub train: u64,
    #[serde(with = "super::config::seed_format")]
    pub selection: u64,
    #[serde(with = "super::config::seed_format")]
    pub report: u64,
}

impl Seeds {
    pub fn new(base: u64) -> Self {
        Self {
            base,
            train: derive_seed(base, stream::TRAIN),
            selection: derive_seed(base, stream::SELECTION),
            report: derive_seed(base, stream::REPORT),
        }
    }
}

/// Classical comparison policies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineKind {
    Gittins,
    Thompson,
    /// Thompson sampling whose pseudo-counts decay toward the prior.
    ThompsonRestless {
        decay: f64,
    },
    Ucb {
        chi: f64,
    },
    RescorlaWagner {
        alpha: f64,
        beta: f64,
        epsilon: f64,
    },
}

impl BaselineKind {
    pub fn name(&self) -> String {
        self.to_string()
    }

    /// Fresh policy for episodes of `trials` decisions; the planner table is
    /// cached under `cache` when given.
    pub fn policy(&self, trials: usize, cache: Option<&Path>) -> Result<Box<dyn BanditPolicy>> {
        Ok(match *self {
            BaselineKind::Gittins => {
                let table = match cache {
                    Some(dir) => GittinsTable::load_or_build(trials, (1.0, 1.0), dir)?,
                    None => GittinsTable::build(trials, (1.0, 1.0)),
                };
                Box::new(GittinsPolicy::new(Arc::new(table)))
            }
            BaselineKind::Thompson => Box::new(ThompsonPolicy::stationary()),
            BaselineKind::ThompsonRestless { decay } => Box::new(ThompsonPolicy::restless(decay)),
            BaselineKind::Ucb { chi } => Box::new(UcbPolicy::new(chi)),
            BaselineKind::RescorlaWagner { alpha, beta, epsilon } => Box::new(RwPolicy::new(alpha, beta, epsilon)),
        })
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaselineKind::Gittins => f.write_str("gittins"),
            BaselineKind::Thompson => f.write_str("thompson"),
            BaselineKind::ThompsonRestless { decay } => write!(f, "thompson-restless:{decay}"),
            BaselineKind::Ucb { chi } => write!(f, "ucb:{chi}"),
            BaselineKind::RescorlaWagner { alpha, beta, epsilon } => write!(f, "rw:{alpha}:{beta}:{epsilon}"),
        }
    }
}

/// `gittins`, `thompson`, `thompson-restless[:decay]`, `ucb[:chi]`,
/// `rw[:alpha[:beta[:epsilon]]]`.
impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let name = parts.next().unwrap_or_default().to_ascii_lowercase();
        let nums: Vec<f64> = parts
            .map(|p| p.parse::<f64>().map_err(|_| Error::config(format!("bad number `{p}` in baseline `{s}`"))))
            .collect::<Result<_>>()?;
        let arg = |i: usize, default: f64| nums.get(i).copied().unwrap_or(default);
        let control = match RW_CONTROL {
            BaselineKind::RescorlaWagner { alpha, beta, epsilon } => (alpha, beta, epsilon),
            _ => unreachable!(),
        };
        Ok(match name.as_str() {
            "gittins" => BaselineKind::Gittins,
            "thompson" => BaselineKind::Thompson,
            "thompson-restless" => BaselineKind::ThompsonRestless { decay: arg(0, 0.95) },
            "ucb" => BaselineKind::Ucb { chi: arg(0, 1.0) },
            "rw" => {
                BaselineKind::RescorlaWagner { alpha: arg(0, control.0), beta: arg(1, control.1), epsilon: arg(2, control.2) }
            }
            _ => return Err(Error::config(format!("unknown baseline `{s}`"))),
        })
    }
}

/// Frozen episodes of a network. Tasks come from `seed`'s own stream and each
/// episode's action noise from a derived one, so every agent evaluated with the
/// same seed meets the same task sequence.
pub fn agent_episodes(
    params: &AgentParams,
    hp: &Hyperparams,
    dist: TaskDist,
    settings: &EnvSettings,
    episodes: usize,
    seed: u64,
) -> Result<Vec<EpisodeRecord>> {
    let mut tasks = crate::seeded_rng(seed);
    (0..episodes)
        .map(|i| {
            let mut env = dist.sample_env(settings, &mut tasks);
            let mut rng = crate::seeded_rng(derive_seed(seed, i as u64 + 1));
            run_episode(params, env.as_mut(), hp, &mut rng, Mode::Frozen).map(|(r, _)| r)
        })
        .collect()
}

/// Baseline episodes on the same task sequence as [`agent_episodes`].
pub fn baseline_episodes(
    kind: &BaselineKind,
    dist: TaskDist,
    settings: &EnvSettings,
    episodes: usize,
    seed: u64,
    cache: Option<&Path>,
) -> Result<Vec<EpisodeRecord>> {
    let mut policy = kind.policy(settings.trials, cache)?;
    let mut tasks = crate::seeded_rng(seed);
    (0..episodes)
        .map(|i| {
            let mut env = dist.sample_env(settings, &mut tasks);
            let mut rng = crate::seeded_rng(derive_seed(seed, i as u64 + 1));
            play_episode(policy.as_mut(), env.as_mut(), &mut rng)
        })
        .collect()
}

/// Selection and report episodes of one evaluation.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub selection: Vec<EpisodeRecord>,
    pub report: Vec<EpisodeRecord>,
}

impl Evaluation {
    pub fn all(&self) -> Vec<EpisodeRecord> {
        self.selection.iter().chain(&self.report).cloned().collect()
    }

    /// Mean final cumulative regret on the selection episodes.
    pub fn selection_metric(&self) -> Result<f64> {
        Ok(mean_and_se(&episode_regrets(&self.selection)?).0)
    }

    /// Mean cumulative-regret curve on the report episodes.
    pub fn report_curve(&self) -> Result<Vec<f64>> {
        regret_mean_curve(&self.report)
    }
}

/// `R_T` of each episode.
pub fn episode_regrets(records: &[EpisodeRecord]) -> Result<Vec<f64>> {
    records.iter().map(|r| regret_curve(r).map(|c| c.total())).collect()
}

/// Trial-wise mean cumulative regret.
pub fn regret_mean_curve(records: &[EpisodeRecord]) -> Result<Vec<f64>> {
    let curves = records.iter().map(|r| regret_curve(r).map(|c| c.cumulative)).collect::<Result<Vec<_>>>()?;
    Ok(mean_curve(&curves))
}

/// Evaluates frozen `params` on the selection and report streams of `seeds`.
pub fn evaluate_agent(
    params: &AgentParams,
    hp: &Hyperparams,
    dist: TaskDist,
    settings: &EnvSettings,
    protocol: &EvalProtocol,
    seeds: &Seeds,
) -> Result<Evaluation> {
    let frozen = Hyperparams { learning_rate: 0.0, ..hp.clone() };
    Ok(Evaluation {
        selection: agent_episodes(params, &frozen, dist, settings, protocol.selection_episodes, seeds.selection)?,
        report: agent_episodes(params, &frozen, dist, settings, protocol.report_episodes, seeds.report)?,
    })
}

#[derive(Serialize)]
struct TrainKey<'a> {
    version: &'a str,
    dist: TaskDist,
    #[serde(with = "super::config::seed_format")]
    seed: u64,
    env: &'a EnvSettings,
    a2c: &'a Hyperparams,
}

/// Trains a fresh network, or with `reuse` loads the one a previous identical
/// run left in `dir`. Writes `params.txt`, `curve.csv` and `train.toml` to `dir`.
pub fn train_agent(
    hp: &Hyperparams,
    dist: TaskDist,
    settings: &EnvSettings,
    seed: u64,
    dir: &Path,
    reuse: bool,
) -> Result<(AgentParams, Option<LearningCurve>)> {
    let key = toml::to_string(&TrainKey { version: VERSION, dist, seed, env: settings, a2c: hp })
        .map_err(|e| Error::config(format!("cannot serialise training key: {e}")))?;
    let key_path = dir.join("train.toml");
    let params_path = dir.join("params.txt");
    if reuse && params_path.exists() && fs::read_to_string(&key_path).ok().as_deref() == Some(key.as_str()) {
        return Ok((load_params(&params_path)?, None));
    }
    fs::create_dir_all(dir)?;
    let out = train(hp, dist, settings, &mut crate::seeded_rng(seed))?;
    save_params(&out.params, &params_path)?;
    write_curve(&dir.join("curve.csv"), &out.curve)?;
    fs::write(&key_path, key)?;
    Ok((out.params, Some(out.curve)))
}

/// Whether to train or only evaluate a saved network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunMode {
    /// Train; with `reuse`, accept a matching network already in the output directory.
    Train { reuse: bool },
    /// Evaluate the checkpoint with the learning rate forced to zero.
    EvalOnly { checkpoint: PathBuf },
}

/// Fits of one agent's restless behaviour.
#[derive(Debug, Clone)]
pub struct RestlessAnalysis {
    pub fits: Vec<FitResult>,
    pub report: VolatilityReport,
}

/// Splits restless episodes by regime into consecutive blocks of
/// `block` episodes, dropping incomplete blocks. Low blocks come first.
pub fn regime_blocks(records: &[EpisodeRecord], block: usize) -> Vec<(Regime, Vec<EpisodeRecord>)> {
    let mut out = Vec::new();
    for regime in [Regime::Low, Regime::High] {
        let eps: Vec<EpisodeRecord> = records
            .iter()
            .filter(|r| matches!(&r.task, TaskRecord::Restless { regime: g, .. } if *g == regime))
            .cloned()
            .collect();
        for chunk in eps.chunks_exact(block) {
            out.push((regime, chunk.to_vec()));
        }
    }
    out
}

/// Fits all four Rescorla-Wagner models to every regime block and compares regimes
/// on the `ab` model's learning rate.
pub fn analyse_restless(records: &[EpisodeRecord]) -> Result<RestlessAnalysis> {
    let mut fits = Vec::new();
    for (i, (_, block)) in regime_blocks(records, BLOCK_EPISODES).iter().enumerate() {
        for model in RwModel::ALL {
            fits.push(fit_rw(block, model, i)?);
        }
    }
    let report = volatility_comparison(&fits, RwModel::AB)?;
    Ok(RestlessAnalysis { fits, report })
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub seeds: Seeds,
    pub out_dir: PathBuf,
    pub params: AgentParams,
    pub eval: Evaluation,
    /// `R_T` per report episode.
    pub report_regret: Vec<f64>,
    pub stay: Option<StayProbTable>,
    pub informative_rate: Option<f64>,
    pub restless: Option<RestlessAnalysis>,
    /// R-W control analysis and its `R_T` per report episode.
    pub control: Option<(RestlessAnalysis, Vec<f64>)>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'a str,
    command: &'a str,
    seeds: Seeds,
    files: Vec<String>,
    config: &'a ExperimentConfig,
}

/// Writes `manifest.toml` listing the run's configuration, seeds and artefacts.
pub fn write_manifest(dir: &Path, command: &str, config: &ExperimentConfig, files: &[&str]) -> Result<()> {
    let manifest = Manifest {
        version: VERSION,
        command,
        seeds: Seeds::new(config.seed),
        files: files.iter().map(|f| f.to_string()).collect(),
        config,
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::config(format!("cannot serialise manifest: {e}")))?;
    fs::write(dir.join("manifest.toml"), text)?;
    Ok(())
}

/// Train (or load), freeze, evaluate on the test distribution, run the
/// analyses that match it, and write everything under `out`.
pub fn run_experiment(config: &ExperimentConfig, out: &Path, mode: &RunMode) -> Result<ExperimentResult> {
    config.validate()?;
    fs::create_dir_all(out)?;
    let seeds = Seeds::new(config.seed);
    let (params, command) = match mode {
        RunMode::Train { reuse } => {
            let (p, _) = train_agent(&config.a2c, config.dist_train, &config.env, seeds.train, out, *reuse)?;
            (p, "train")
        }
        RunMode::EvalOnly { checkpoint } => {
            let p = load_params(checkpoint)?;
            save_params(&p, &out.join("params.txt"))?;
            (p, "eval")
        }
    };
    let eval = evaluate_agent(&params, &config.a2c, config.dist_test, &config.env, &config.eval, &seeds)?;
    let all = eval.all();
    let mut files = vec!["params.txt", "episodes.csv", "tasks.csv", "regret.csv"];
    if matches!(mode, RunMode::Train { .. }) && out.join("curve.csv").exists() {
        files.push("curve.csv");
    }
    write_episodes(out, &all)?;
    let train_tag = config.dist_train.tag();
    write_regret(&out.join("regret.csv"), &regret_rows("agent", train_tag, &all, 0)?)?;

    let mut result = ExperimentResult {
        config: config.clone(),
        seeds,
        out_dir: out.to_path_buf(),
        params,
        report_regret: episode_regrets(&eval.report)?,
        eval,
        stay: None,
        informative_rate: None,
        restless: None,
        control: None,
    };
    match config.dist_test {
        TaskDist::TwoStep => {
            let table = stay_probabilities(&all)?;
            write_stay(&out.join("stayprob.csv"), &table)?;
            files.push("stayprob.csv");
            result.stay = Some(table);
        }
        TaskDist::Informative => result.informative_rate = Some(informative_strategy_rate(&all)?),
        TaskDist::Restless => {
            let agent = analyse_restless(&all)?;
            write_fits(&out.join("fits.csv"), &agent.fits)?;
            let control_all = [
                baseline_episodes(
                    &RW_CONTROL,
                    TaskDist::Restless,
                    &config.env,
                    config.eval.selection_episodes,
                    seeds.selection,
                    None,
                )?,
                baseline_episodes(&RW_CONTROL, TaskDist::Restless, &config.env, config.eval.report_episodes, seeds.report, None)?,
            ]
            .concat();
            let control = analyse_restless(&control_all)?;
            write_fits(&out.join("fits_control.csv"), &control.fits)?;
            let control_report = &control_all[config.eval.selection_episodes..];
            write_regret(&out.join("regret_control.csv"), &regret_rows(&RW_CONTROL.name(), "-", &control_all, 0)?)?;
            files.extend(["fits.csv", "fits_control.csv", "regret_control.csv"]);
            result.restless = Some(agent);
            result.control = Some((control, episode_regrets(control_report)?));
        }
        _ => {}
    }
    write_manifest(out, command, config, &files)?;
    Ok(result)
}
