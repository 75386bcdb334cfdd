//! Evaluation: regret, top-k aggregation, informative-arm strategy, stay probabilities and Rescorla-Wagner fits.

mod fit;
mod informative;
mod optimize;
mod regret;
mod stats;
mod stay;
mod topk;
mod volatility;

pub use fit::{bic, fit_rw, rw_log_likelihood, FitResult, RwModel, RwParams};
pub use informative::{follows_informative_strategy, informative_strategy_rate};
pub use optimize::{nelder_mead, NelderMead};
pub use regret::{mean_curve, regret_curve, suboptimal_rate, RegretReport};
pub use stats::{mean, mean_and_se, paired_difference, welch, Welch};
pub use stay::{stay_probabilities, StayCondition, StayProbTable};
pub use topk::{aggregate_top_k, RankedRun};
pub use volatility::{volatility_comparison, VolatilityReport};
