use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::a2c::{EntropySchedule, Hyperparams, InputFlags};
use crate::envs::{EnvSettings, TaskDist, INFORMATIVE_TRIALS, TWO_STEP_TRIALS};
use crate::{Error, Result};

/// The five reproduced experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Experiment {
    /// Independent-arm bandits.
    Exp1,
    /// Correlated-arm bandits and the train/test matrix.
    Exp2,
    /// Informative-arm bandit.
    Exp3,
    /// Restless bandits.
    Exp4,
    /// Two-step task.
    Exp5,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [Experiment::Exp1, Experiment::Exp2, Experiment::Exp3, Experiment::Exp4, Experiment::Exp5];

    pub fn id(self) -> &'static str {
        match self {
            Experiment::Exp1 => "exp1",
            Experiment::Exp2 => "exp2",
            Experiment::Exp3 => "exp3",
            Experiment::Exp4 => "exp4",
            Experiment::Exp5 => "exp5",
        }
    }

    /// Default training and test distribution.
    pub fn default_dist(self) -> TaskDist {
        match self {
            Experiment::Exp1 => TaskDist::Independent,
            Experiment::Exp2 => TaskDist::Uniform,
            Experiment::Exp3 => TaskDist::Informative,
            Experiment::Exp4 => TaskDist::Restless,
            Experiment::Exp5 => TaskDist::TwoStep,
        }
    }

    /// Default A2C hyperparameters. Learning rate and discount are tuned
    /// values; a sweep resamples them.
    pub fn hyperparams(self) -> Hyperparams {
        let base = Hyperparams::default();
        match self {
            Experiment::Exp1 | Experiment::Exp2 => Hyperparams { learning_rate: 3e-3, discount: 0.7, ..base },
            Experiment::Exp3 => Hyperparams {
                learning_rate: 1e-3,
                discount: 0.8,
                unroll: INFORMATIVE_TRIALS,
                trials: INFORMATIVE_TRIALS,
                episode_len: INFORMATIVE_TRIALS,
                episodes: 100_000,
                ..base
            },
            Experiment::Exp4 => Hyperparams {
                learning_rate: 1e-3,
                discount: 0.8,
                unroll: 150,
                trials: 150,
                episode_len: 150,
                episodes: 60_000,
                ..base
            },
            Experiment::Exp5 => Hyperparams {
                learning_rate: 1e-3,
                discount: 0.9,
                entropy: EntropySchedule::constant(0.05),
                unroll: 2 * TWO_STEP_TRIALS,
                trials: TWO_STEP_TRIALS,
                episode_len: 2 * TWO_STEP_TRIALS,
                inputs: InputFlags { reward: true, action: true, timestep: true, observation: true },
                ..base
            },
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.id() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::config(format!("unknown experiment `{s}` (expected exp1..exp5)")))
    }
}

impl TryFrom<String> for Experiment {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Experiment> for String {
    fn from(e: Experiment) -> String {
        e.id().to_string()
    }
}

/// Frozen evaluation: a selection set followed by a report set, drawn from
/// disjoint seed streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalProtocol {
    pub selection_episodes: usize,
    pub report_episodes: usize,
}

impl Default for EvalProtocol {
    fn default() -> Self {
        Self { selection_episodes: 150, report_episodes: 150 }
    }
}

impl EvalProtocol {
    pub fn total(&self) -> usize {
        self.selection_episodes + self.report_episodes
    }
}

/// Random hyperparameter search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub samples: usize,
    pub top_k: usize,
    /// Sampled log-uniformly.
    pub learning_rate: (f64, f64),
    /// Sampled uniformly.
    pub discount: (f64, f64),
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { samples: 100, top_k: 5, learning_rate: (1e-4, 5e-3), discount: (0.5, 0.99) }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.top_k == 0 || self.samples < self.top_k {
            return Err(Error::config(format!("sweep of {} samples cannot report a top {}", self.samples, self.top_k)));
        }
        let (lo, hi) = self.learning_rate;
        if !(lo > 0.0 && lo <= hi) {
            return Err(Error::config(format!("learning-rate range [{lo}, {hi}] is invalid")));
        }
        let (lo, hi) = self.discount;
        if !(0.0..=1.0).contains(&lo) || !(lo..=1.0).contains(&hi) {
            return Err(Error::config(format!("discount range [{lo}, {hi}] is invalid")));
        }
        Ok(())
    }
}

/// TOML integers are signed, so seeds above `i64::MAX` are written as strings.
pub(crate) mod seed_format {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*seed) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&seed.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => u64::try_from(v).map_err(|_| de::Error::custom(format!("negative seed {v}"))),
            Raw::Text(t) => t.trim().parse().map_err(|_| de::Error::custom(format!("bad seed `{t}`"))),
        }
    }
}

/// Everything needed to reproduce one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub exp: Experiment,
    pub dist_train: TaskDist,
    pub dist_test: TaskDist,
    #[serde(with = "seed_format")]
    pub seed: u64,
    /// Train a twin without the reward input.
    pub ablate_reward: bool,
    pub a2c: Hyperparams,
    pub env: EnvSettings,
    pub eval: EvalProtocol,
    pub sweep: SweepSpec,
}

impl ExperimentConfig {
    pub fn defaults(exp: Experiment) -> Self {
        let a2c = exp.hyperparams();
        let dist = exp.default_dist();
        Self {
            exp,
            dist_train: dist,
            dist_test: dist,
            seed: 1,
            ablate_reward: false,
            env: EnvSettings { trials: a2c.trials, ..Default::default() },
            a2c,
            eval: EvalProtocol::default(),
            sweep: SweepSpec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.a2c.validate()?;
        self.sweep.validate()?;
        if self.env.trials != self.a2c.trials {
            return Err(Error::config(format!(
                "environment plays {} trials but the agent is configured for {}",
                self.env.trials, self.a2c.trials
            )));
        }
        for dist in [self.dist_train, self.dist_test] {
            let steps = self.a2c.trials * dist.steps_per_trial();
            if steps != self.a2c.episode_len {
                return Err(Error::config(format!(
                    "`{dist}` episodes of {} trials last {steps} steps, not {}",
                    self.a2c.trials, self.a2c.episode_len
                )));
            }
        }
        if self.dist_train.num_actions() != self.dist_test.num_actions()
            || self.dist_train.observation_size() != self.dist_test.observation_size()
            || self.dist_train.reward_encoding() != self.dist_test.reward_encoding()
        {
            return Err(Error::config(format!(
                "an agent trained on `{}` cannot be tested on `{}`",
                self.dist_train, self.dist_test
            )));
        }
        Ok(())
    }

    /// Serialises to the config-file format.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(format!("cannot serialise config: {e}")))
    }

    /// Parses a config file or run manifest. Missing keys take the defaults of the file's
    /// `exp` (or of `exp` when given, which also overrides the file).
    pub fn from_toml(text: &str, exp: Option<Experiment>) -> Result<Self> {
        let mut file: toml::Table = text.parse().map_err(|e| Error::config(format!("invalid config file: {e}")))?;
        // A run manifest carries its configuration in a `config` table.
        if let (Some(toml::Value::Table(inner)), true) = (file.get("config"), file.contains_key("seeds")) {
            file = inner.clone();
        }
        let exp = match (exp, file.get("exp")) {
            (Some(e), _) => e,
            (None, Some(toml::Value::String(s))) => s.parse()?,
            (None, Some(v)) => return Err(Error::config(format!("`exp` must be a string, got {v}"))),
            (None, None) => Experiment::Exp1,
        };
        let defaults = Self::defaults(exp);
        let mut merged: toml::Table =
            toml::Table::try_from(&defaults).map_err(|e| Error::config(format!("cannot serialise defaults: {e}")))?;
        merge(&mut merged, file);
        merged.insert("exp".into(), toml::Value::String(exp.id().into()));
        let cfg: Self = toml::Value::Table(merged)
            .try_into()
            .map_err(|e: toml::de::Error| Error::config(format!("invalid config file: {e}")))?;
        Ok(cfg)
    }

    pub fn load(path: &Path, exp: Option<Experiment>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text, exp)
    }
}

/// Overlays `over` onto `base`, descending into nested tables.
fn merge(base: &mut toml::Table, over: toml::Table) {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}
