//! Trains on the two-step task and prints the stay probabilities split by
//! reward and transition type of the previous trial.

use metabandit::analysis::StayCondition;
use metabandit::harness::{run_experiment, Experiment, ExperimentConfig, RunMode};

fn main() -> metabandit::Result<()> {
    let mut cfg = ExperimentConfig::defaults(Experiment::Exp5);
    if let Some(n) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.a2c.episodes = n;
    }
    let out = metabandit::harness::default_out_root().join("examples/two_step");
    let result = run_experiment(&cfg, &out, &RunMode::Train { reuse: true })?;
    let Some(table) = result.stay else {
        return Ok(());
    };
    for c in StayCondition::ALL {
        match table.p_stay(c) {
            Some(p) => println!("{:<20} P(stay) = {p:.3}", c.label()),
            None => println!("{:<20} never occurred", c.label()),
        }
    }
    Ok(())
}
