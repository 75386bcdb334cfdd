//! Trains on restless bandits with low- and high-volatility regimes, fits
//! Rescorla-Wagner models to blocks of the frozen agent's choices, and
//! compares the fitted learning rates across regimes.

use metabandit::analysis::{mean_and_se, VolatilityReport};
use metabandit::harness::{run_experiment, Experiment, ExperimentConfig, RunMode};

fn show(name: &str, rep: &VolatilityReport) {
    println!(
        "{name}: alpha low {:.3} ± {:.3} ({} blocks), high {:.3} ± {:.3} ({} blocks), t = {:.2}",
        rep.low_alpha.0, rep.low_alpha.1, rep.low_blocks, rep.high_alpha.0, rep.high_alpha.1, rep.high_blocks, rep.difference.t
    );
    for (model, bic) in &rep.total_bic {
        println!("    {model:<4} total BIC {bic:>10.1}  wins {}", rep.wins.get(model).copied().unwrap_or(0));
    }
}

fn main() -> metabandit::Result<()> {
    let mut cfg = ExperimentConfig::defaults(Experiment::Exp4);
    if let Some(n) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.a2c.episodes = n;
    }
    let out = metabandit::harness::default_out_root().join("examples/restless");
    let result = run_experiment(&cfg, &out, &RunMode::Train { reuse: true })?;

    if let Some(agent) = &result.restless {
        show("agent", &agent.report);
        println!("agent favours a free learning rate: {}", agent.report.favors_free_alpha());
    }
    if let Some((control, regret)) = &result.control {
        show("fixed-rate control", &control.report);
        let (c, cse) = mean_and_se(regret);
        let (a, ase) = mean_and_se(&result.report_regret);
        println!("R_{}: agent {a:.3} ± {ase:.3}, control {c:.3} ± {cse:.3}", cfg.env.trials);
    }
    Ok(())
}
