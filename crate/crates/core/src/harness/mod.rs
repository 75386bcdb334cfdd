//! Reproduction driver: experiment configs, training and frozen evaluation,
//! hyperparameter sweeps, the train/test matrix, ablations and result files.
//!
//! Every run writes CSVs plus a `manifest.toml` holding the full configuration
//! and seeds; feeding the manifest back as a config file reproduces the run.

mod compare;
mod config;
mod plot;
mod records;
mod run;
mod sweep;

use std::path::PathBuf;

pub use compare::{
    ablate_reward_input, cross_matrix, matrix_agent_dir, AblationArm, AblationReport, CrossMatrix, MATRIX_CANDIDATES,
};
pub use config::{EvalProtocol, Experiment, ExperimentConfig, SweepSpec};
pub use plot::{bar_plot, line_plot, plot_dir};
pub use records::{read_episodes, read_regret, regret_rows, write_episodes, write_fits, write_regret, write_stay, RegretRow};
pub use run::{
    agent_episodes, analyse_restless, baseline_episodes, derive_seed, episode_regrets, evaluate_agent, regime_blocks,
    regret_mean_curve, run_experiment, stream, train_agent, write_manifest, BaselineKind, Evaluation, ExperimentResult,
    RestlessAnalysis, RunMode, Seeds, BLOCK_EPISODES, RW_CONTROL, VERSION,
};
pub use sweep::{sample_hyperparams, sweep, SweepResult, SweepRun};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "METABANDIT_OUT";

/// Output root: `METABANDIT_OUT` if set, else `results`.
pub fn default_out_root() -> PathBuf {
    std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("results"))
}
