use std::fs;
use std::path::Path;

use rand::Rng as _;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::records::{write_regret, RegretRow};
use super::run::{derive_seed, episode_regrets, evaluate_agent, stream, train_agent, write_manifest, Seeds};
use crate::a2c::Hyperparams;
use crate::analysis::{aggregate_top_k, RankedRun};
use crate::{Error, Result};

/// One sampled hyperparameter setting and how it fared.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRun {
    pub index: usize,
    /// Seed used to train this sample.
    pub seed: u64,
    pub learning_rate: f64,
    pub discount: f64,
    /// Mean `R_T` on the selection episodes; `None` if training failed.
    pub selection_metric: Option<f64>,
    /// Mean cumulative-regret curve on the report episodes.
    pub report_curve: Vec<f64>,
    /// `R_T` per report episode.
    pub report_regret: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub runs: Vec<SweepRun>,
    /// Indices of the top-k runs, best first.
    pub top: Vec<usize>,
    /// Mean report curve of the top-k runs.
    pub aggregate: Vec<f64>,
    /// Per report episode, `R_T` averaged over the top-k runs.
    pub aggregate_regret: Vec<f64>,
}

/// Hyperparameters of sample `index`: learning rate log-uniform and discount
/// uniform within the configured ranges, drawn from the sample's own stream.
pub fn sample_hyperparams(config: &ExperimentConfig, index: usize) -> (Hyperparams, u64) {
    let seed = derive_seed(derive_seed(config.seed, stream::SWEEP), index as u64);
    let mut rng = crate::seeded_rng(seed);
    let (lo, hi) = config.sweep.learning_rate;
    let learning_rate = (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp();
    let (dlo, dhi) = config.sweep.discount;
    let discount = dlo + rng.random::<f64>() * (dhi - dlo);
    (Hyperparams { learning_rate, discount, ..config.a2c.clone() }, derive_seed(seed, stream::TRAIN))
}

fn run_sample(config: &ExperimentConfig, index: usize, out: &Path, reuse: bool) -> SweepRun {
    let (hp, seed) = sample_hyperparams(config, index);
    let mut run = SweepRun {
        index,
        seed,
        learning_rate: hp.learning_rate,
        discount: hp.discount,
        selection_metric: None,
        report_curve: Vec::new(),
        report_regret: Vec::new(),
        error: None,
    };
    let dir = out.join("samples").join(format!("{index:03}"));
    let outcome = train_agent(&hp, config.dist_train, &config.env, seed, &dir, reuse).and_then(|(params, _)| {
        let eval = evaluate_agent(&params, &hp, config.dist_test, &config.env, &config.eval, &Seeds::new(config.seed))?;
        Ok((eval.selection_metric()?, eval.report_curve()?, episode_regrets(&eval.report)?))
    });
    match outcome {
        Ok((metric, curve, regret)) => {
            run.selection_metric = Some(metric);
            run.report_curve = curve;
            run.report_regret = regret;
        }
        Err(e) => run.error = Some(e.to_string()),
    }
    run
}

/// Trains `config.sweep.samples` settings on a pool of `workers` threads, ranks
/// them on the selection episodes and averages the top `k` on the report episodes.
/// Every sample is evaluated on the same selection and report episodes.
pub fn sweep(config: &ExperimentConfig, out: &Path, workers: usize, reuse: bool) -> Result<SweepResult> {
    config.validate()?;
    fs::create_dir_all(out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::config(format!("cannot start {workers} workers: {e}")))?;
    let runs: Vec<SweepRun> =
        pool.install(|| (0..config.sweep.samples).into_par_iter().map(|i| run_sample(config, i, out, reuse)).collect());

    let ok: Vec<&SweepRun> = runs.iter().filter(|r| r.selection_metric.is_some()).collect();
    if ok.is_empty() {
        return Err(Error::Divergence { step: 0, what: format!("all {} sweep samples failed", runs.len()) });
    }
    let k = config.sweep.top_k.min(ok.len());
    let seeds = Seeds::new(config.seed);
    let ranked: Vec<RankedRun> = ok
        .iter()
        .map(|r| RankedRun {
            selection_metric: r.selection_metric.unwrap_or(f64::INFINITY),
            curve: r.report_curve.clone(),
            selection_seed: seeds.selection,
            report_seed: seeds.report,
        })
        .collect();
    let aggregate = aggregate_top_k(&ranked, k)?;
    let mut order: Vec<&SweepRun> = ok.clone();
    order.sort_by(|a, b| {
        a.selection_metric
            .unwrap_or(f64::INFINITY)
            .total_cmp(&b.selection_metric.unwrap_or(f64::INFINITY))
            .then(a.index.cmp(&b.index))
    });
    let top: Vec<usize> = order[..k].iter().map(|r| r.index).collect();
    let n = order[0].report_regret.len();
    let aggregate_regret = (0..n).map(|e| order[..k].iter().map(|r| r.report_regret[e]).sum::<f64>() / k as f64).collect();

    let result = SweepResult { runs, top, aggregate, aggregate_regret };
    write_sweep(out, config, &result)?;
    Ok(result)
}

fn write_sweep(out: &Path, config: &ExperimentConfig, result: &SweepResult) -> Result<()> {
    let mut w = csv::Writer::from_path(out.join("sweep.csv"))?;
    w.write_record(["index", "seed", "learning_rate", "discount", "selection_regret", "report_regret", "rank", "error"])?;
    for r in &result.runs {
        let rank = result.top.iter().position(|&i| i == r.index).map(|p| (p + 1).to_string()).unwrap_or_default();
        let report = r.report_curve.last().map(|v| format!("{v:?}")).unwrap_or_default();
        w.write_record([
            r.index.to_string(),
            r.seed.to_string(),
            format!("{:?}", r.learning_rate),
            format!("{:?}", r.discount),
            r.selection_metric.map(|m| format!("{m:?}")).unwrap_or_default(),
            report,
            rank,
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;

    let tag = format!("top{}", result.top.len());
    let rows: Vec<RegretRow> = result
        .aggregate
        .iter()
        .enumerate()
        .map(|(trial, &cum)| RegretRow {
            agent: tag.clone(),
            dist_train: config.dist_train.tag().to_string(),
            dist_test: config.dist_test,
            episode: 0,
            trial,
            regret: cum - if trial == 0 { 0.0 } else { result.aggregate[trial - 1] },
            cumregret: cum,
        })
        .collect();
    write_regret(&out.join("regret.csv"), &rows)?;
    write_manifest(out, "sweep", config, &["sweep.csv", "regret.csv", "samples/"])?;
    Ok(())
}
