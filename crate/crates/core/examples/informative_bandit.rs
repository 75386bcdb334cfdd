//! Trains on the informative bandit, where one arm's payout names the target
//! arm, and measures how often the frozen agent pulls the informative arm
//! first and then the target it points to.
//!
//! The default budget is the full training run; pass a smaller episode count
//! for a quick look.

use metabandit::harness::{run_experiment, Experiment, ExperimentConfig, RunMode};

fn main() -> metabandit::Result<()> {
    let mut cfg = ExperimentConfig::defaults(Experiment::Exp3);
    if let Some(n) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.a2c.episodes = n;
    }
    let out = metabandit::harness::default_out_root().join("examples/informative");
    let result = run_experiment(&cfg, &out, &RunMode::Train { reuse: true })?;
    let rate = result.informative_rate.unwrap_or(f64::NAN);
    println!("informative-then-target in {:.1}% of {} test episodes", 100.0 * rate, cfg.eval.total());

    let first = &result.eval.report[0];
    let arms: Vec<usize> = first.choices().map(|(_, a)| a).collect();
    println!("first test episode pulls: {arms:?}");
    Ok(())
}
