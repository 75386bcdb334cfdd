//! Simulates a Rescorla-Wagner learner on restless bandits and recovers its
//! parameters by maximum likelihood, comparing the four model variants by BIC.

use metabandit::analysis::{fit_rw, RwModel};
use metabandit::envs::{EnvSettings, TaskDist};
use metabandit::harness::{baseline_episodes, BaselineKind};

fn main() -> metabandit::Result<()> {
    let truth = BaselineKind::RescorlaWagner { alpha: 0.3, beta: 5.0, epsilon: 0.05 };
    let settings = EnvSettings { trials: 150, ..EnvSettings::default() };
    let records = baseline_episodes(&truth, TaskDist::Restless, &settings, 20, 3, None)?;
    println!("generating model {truth}, {} choices", records.iter().map(|r| r.choices().count()).sum::<usize>());
    for model in RwModel::ALL {
        let fit = fit_rw(&records, model, 0)?;
        println!(
            "{:<4} alpha {:.3} beta {:>7.3} epsilon {:.3}  loglik {:>9.2}  BIC {:>9.2}",
            model.to_string(),
            fit.alpha,
            fit.beta,
            fit.epsilon,
            fit.loglik,
            fit.bic
        );
    }
    Ok(())
}
