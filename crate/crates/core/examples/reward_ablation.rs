//! Trains the same agent with and without the previous-reward input on easy
//! correlated bandits. Without reward feedback it cannot tell the arms apart.

use metabandit::envs::TaskDist;
use metabandit::harness::{ablate_reward_input, Experiment, ExperimentConfig};

fn main() -> metabandit::Result<()> {
    let mut cfg = ExperimentConfig::defaults(Experiment::Exp2);
    cfg.dist_train = TaskDist::Easy;
    cfg.dist_test = TaskDist::Easy;
    if let Some(n) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.a2c.episodes = n;
    }
    let out = metabandit::harness::default_out_root().join("examples/reward_ablation");
    let report = ablate_reward_input(&cfg, &out, true, true)?;
    for (name, arm) in [("with reward", &report.with_reward), ("without reward", &report.without_reward)] {
        let (rate, se) = arm.suboptimal_rate();
        let regret = arm.curve.last().copied().unwrap_or(f64::NAN);
        println!("{name:<15} suboptimal pulls {rate:.3} ± {se:.3}, R_T {regret:.3}");
    }
    Ok(())
}
