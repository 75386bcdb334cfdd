//! Trains the LSTM agent on independent Bernoulli arms, freezes it, and
//! compares its regret with Thompson sampling on the same tasks.
//!
//! `cargo run --release --example train_independent -- 20000`

use metabandit::analysis::{mean_and_se, paired_difference};
use metabandit::harness::{
    baseline_episodes, episode_regrets, run_experiment, BaselineKind, Experiment, ExperimentConfig, RunMode,
};

fn main() -> metabandit::Result<()> {
    let mut cfg = ExperimentConfig::defaults(Experiment::Exp1);
    cfg.a2c.episodes = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5000);
    let out = metabandit::harness::default_out_root().join("examples/train_independent");
    let result = run_experiment(&cfg, &out, &RunMode::Train { reuse: true })?;

    let (agent, se) = mean_and_se(&result.report_regret);
    let thompson = episode_regrets(&baseline_episodes(
        &BaselineKind::Thompson,
        cfg.dist_test,
        &cfg.env,
        cfg.eval.report_episodes,
        result.seeds.report,
        None,
    )?)?;
    let (d, dse) = paired_difference(&thompson, &result.report_regret);
    println!("agent after {} episodes: R_{} = {agent:.3} ± {se:.3}", cfg.a2c.episodes, cfg.env.trials);
    println!("thompson - agent: {d:.3} ± {dse:.3}");
    println!("outputs in {}", result.out_dir.display());
    Ok(())
}
