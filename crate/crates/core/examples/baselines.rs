//! Runs the classical bandit policies on paired independent-arm tasks and
//! prints their mean cumulative regret.

use metabandit::analysis::{mean_and_se, paired_difference};
use metabandit::envs::{EnvSettings, TaskDist};
use metabandit::harness::{baseline_episodes, episode_regrets, BaselineKind};

fn main() -> metabandit::Result<()> {
    let episodes: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let settings = EnvSettings::default();
    let cache = metabandit::harness::default_out_root().join("gittins");

    let mut results = Vec::new();
    for name in ["gittins", "thompson", "ucb", "rw"] {
        let kind: BaselineKind = name.parse()?;
        let regrets = episode_regrets(&baseline_episodes(&kind, TaskDist::Independent, &settings, episodes, 11, Some(&cache))?)?;
        let (m, se) = mean_and_se(&regrets);
        println!("{:<12} R_{} = {m:.3} ± {se:.3}", kind.name(), settings.trials);
        results.push((kind, regrets));
    }
    let (d, se) = paired_difference(&results[1].1, &results[0].1);
    println!("thompson - gittins on the same tasks: {d:.3} ± {se:.3}");
    Ok(())
}
