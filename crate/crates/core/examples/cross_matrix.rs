//! Trains agents on two task distributions and tests each on every
//! distribution, giving a train-by-test regret matrix on paired tasks.

use metabandit::envs::TaskDist;
use metabandit::harness::{cross_matrix, Experiment, ExperimentConfig};

fn main() -> metabandit::Result<()> {
    let mut cfg = ExperimentConfig::defaults(Experiment::Exp2);
    if let Some(n) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.a2c.episodes = n;
    }
    let train = [TaskDist::Independent, TaskDist::Uniform];
    let test = [TaskDist::Independent, TaskDist::Uniform, TaskDist::Easy, TaskDist::Medium, TaskDist::Hard];
    let out = metabandit::harness::default_out_root().join("examples/cross_matrix");
    let m = cross_matrix(&cfg, &train, &test, &out, true)?;

    print!("{:<10}", "train\\test");
    for t in &test {
        print!("{:>16}", t.tag());
    }
    println!();
    for tr in &train {
        print!("{:<10}", tr.tag());
        for te in &test {
            let (mean, se) = m.cell(*tr, *te)?;
            print!("{:>16}", format!("{mean:.2} ± {se:.2}"));
        }
        println!();
    }
    Ok(())
}
