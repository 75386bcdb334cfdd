//! Random search over learning rate and discount, ranking samples on
//! selection episodes and averaging the best few on held-out report episodes.
//!
//! `cargo run --release --example sweep -- 8 2000` runs 8 samples of 2000
//! training episodes each.

use metabandit::analysis::mean_and_se;
use metabandit::harness::{sweep, Experiment, ExperimentConfig};

fn main() -> metabandit::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().ok());
    let mut cfg = ExperimentConfig::defaults(Experiment::Exp1);
    cfg.sweep.samples = args.next().flatten().unwrap_or(6);
    cfg.a2c.episodes = args.next().flatten().unwrap_or(2000);
    cfg.sweep.top_k = cfg.sweep.top_k.min(cfg.sweep.samples);

    let out = metabandit::harness::default_out_root().join("examples/sweep");
    let result = sweep(&cfg, &out, 1, true)?;
    for run in &result.runs {
        let metric = run.selection_metric.map_or("failed".to_string(), |m| format!("{m:.3}"));
        println!("sample {:>3}: lr {:.2e} gamma {:.3} selection R_T {metric}", run.index, run.learning_rate, run.discount);
    }
    let (m, se) = mean_and_se(&result.aggregate_regret);
    println!("top {:?}: report R_T {m:.3} ± {se:.3}", result.top);
    Ok(())
}
