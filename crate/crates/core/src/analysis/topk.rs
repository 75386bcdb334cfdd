use crate::{Error, Result};

/// One trained run's selection score and report-set curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedRun {
    /// Mean cumulative regret on the selection episodes; lower is better.
    pub selection_metric: f64,
    /// Mean cumulative-regret curve on the report episodes.
    pub curve: Vec<f64>,
    /// Seed of the selection episode stream.
    pub selection_seed: u64,
    /// Seed of the report episode stream.
    pub report_seed: u64,
}

/// Mean curve of the `k` runs with the lowest selection metric.
///
/// Every run must have been scored and reported on different episode streams.
pub fn aggregate_top_k(runs: &[RankedRun], k: usize) -> Result<Vec<f64>> {
    if k == 0 || k > runs.len() {
        return Err(Error::config(format!("cannot take the top {k} of {} runs", runs.len())));
    }
    for r in runs {
        assert_ne!(r.selection_seed, r.report_seed, "selection and report episodes must be disjoint");
    }
    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by(|&a, &b| runs[a].selection_metric.total_cmp(&runs[b].selection_metric).then(a.cmp(&b)));
    let chosen: Vec<Vec<f64>> = order[..k].iter().map(|&i| runs[i].curve.clone()).collect();
    Ok(super::mean_curve(&chosen))
}
