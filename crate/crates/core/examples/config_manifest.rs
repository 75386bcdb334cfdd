//! Writes an experiment config to TOML, edits it, runs a tiny experiment from
//! it, and replays the run from the manifest it leaves behind.

use std::fs;

use metabandit::harness::{run_experiment, Experiment, ExperimentConfig, RunMode};

fn main() -> metabandit::Result<()> {
    let root = metabandit::harness::default_out_root().join("examples/config_manifest");
    fs::create_dir_all(&root)?;

    let mut cfg = ExperimentConfig::defaults(Experiment::Exp5);
    cfg.a2c.episodes = 200;
    cfg.seed = 2024;
    let path = root.join("exp5.toml");
    fs::write(&path, cfg.to_toml()?)?;
    println!("wrote {}", path.display());

    let loaded = ExperimentConfig::load(&path, None)?;
    let first = run_experiment(&loaded, &root.join("first"), &RunMode::Train { reuse: false })?;

    let replay = ExperimentConfig::load(&first.out_dir.join("manifest.toml"), None)?;
    let second = run_experiment(&replay, &root.join("second"), &RunMode::Train { reuse: false })?;

    let same = fs::read(first.out_dir.join("episodes.csv"))? == fs::read(second.out_dir.join("episodes.csv"))?;
    println!("seeds {:?}", first.seeds);
    println!("replayed episodes identical: {same}");
    Ok(())
}
