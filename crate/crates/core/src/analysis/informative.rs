use crate::a2c::EpisodeRecord;
use crate::envs::{TaskRecord, INFORMATIVE_ARMS};
use crate::{Error, Result};

/// Whether an informative-bandit episode opened on the informative arm and
/// then pulled the target arm on every remaining trial.
pub fn follows_informative_strategy(record: &EpisodeRecord) -> Result<bool> {
    let target = match &record.task {
        TaskRecord::Bandit(b) => b.target,
        _ => None,
    }
    .ok_or_else(|| Error::InvalidRecord(format!("`{}` episode has no target arm", record.dist)))?;
    let mut pulls = record.pulls().map(|(a, _)| a);
    Ok(pulls.next() == Some(INFORMATIVE_ARMS - 1) && pulls.all(|a| a == target))
}

/// Fraction of episodes that follow the informative strategy.
pub fn informative_strategy_rate(records: &[EpisodeRecord]) -> Result<f64> {
    let mut hits = 0;
    for r in records {
        hits += follows_informative_strategy(r)? as usize;
    }
    Ok(hits as f64 / records.len().max(1) as f64)
}
