use std::collections::BTreeMap;

use super::fit::{FitResult, RwModel};
use super::stats::{mean_and_se, welch, Welch};
use crate::envs::Regime;
use crate::{Error, Result};

/// Learning rates by regime and model preference by BIC.
#[derive(Debug, Clone, PartialEq)]
pub struct VolatilityReport {
    /// Model whose fitted `α` is compared.
    pub alpha_model: RwModel,
    pub low_alpha: (f64, f64),
    pub high_alpha: (f64, f64),
    /// High minus low.
    pub difference: Welch,
    pub low_blocks: usize,
    pub high_blocks: usize,
    /// Blocks where each model has the lowest BIC.
    pub wins: BTreeMap<&'static str, usize>,
    /// BIC summed over blocks.
    pub total_bic: BTreeMap<&'static str, f64>,
}

impl VolatilityReport {
    /// Aggregate BIC favours a model with a free learning rate.
    pub fn favors_free_alpha(&self) -> bool {
        let best = |free: bool| {
            RwModel::ALL
                .into_iter()
                .filter(|m| m.free_alpha() == free)
                .filter_map(|m| self.total_bic.get(m.tag()).copied())
                .fold(f64::INFINITY, f64::min)
        };
        best(true) < best(false)
    }
}

/// Compares fits across volatility regimes. `fits` may hold several models per
/// block; the `α` comparison uses only `alpha_model`.
pub fn volatility_comparison(fits: &[FitResult], alpha_model: RwModel) -> Result<VolatilityReport> {
    let alphas = |r: Regime| -> Vec<f64> {
        fits.iter().filter(|f| f.model == alpha_model && f.volatility == Some(r)).map(|f| f.alpha).collect()
    };
    let (low, high) = (alphas(Regime::Low), alphas(Regime::High));
    if low.len() < 2 || high.len() < 2 {
        return Err(Error::config(format!(
            "volatility comparison needs at least 2 blocks per regime (low {}, high {})",
            low.len(),
            high.len()
        )));
    }

    let mut by_block: BTreeMap<usize, Vec<&FitResult>> = BTreeMap::new();
    for f in fits {
        by_block.entry(f.block).or_default().push(f);
    }
    let mut wins = BTreeMap::new();
    let mut total_bic = BTreeMap::new();
    for f in fits {
        *total_bic.entry(f.model.tag()).or_insert(0.0) += f.bic;
        wins.entry(f.model.tag()).or_insert(0);
    }
    for block in by_block.values() {
        if let Some(best) = block.iter().min_by(|a, b| a.bic.total_cmp(&b.bic)) {
            *wins.entry(best.model.tag()).or_insert(0) += 1;
        }
    }

    Ok(VolatilityReport {
        alpha_model,
        low_alpha: mean_and_se(&low),
        high_alpha: mean_and_se(&high),
        difference: welch(&high, &low),
        low_blocks: low.len(),
        high_blocks: high.len(),
        wins,
        total_bic,
    })
}
