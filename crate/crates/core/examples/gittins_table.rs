//! Builds the finite-horizon Bayes-optimal table for two Bernoulli arms under
//! uniform priors and inspects a few states.

use std::time::Instant;

use metabandit::baselines::GittinsTable;

fn main() -> metabandit::Result<()> {
    let horizon: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let dir = metabandit::harness::default_out_root().join("gittins");

    let started = Instant::now();
    let table = GittinsTable::load_or_build(horizon, (1.0, 1.0), &dir)?;
    println!("horizon {horizon}: {} states in {:.2?} (cached under {})", table.num_states(), started.elapsed(), dir.display());
    println!("expected total reward from the start: {:.4}", table.value([0; 4]));

    // State is [successes arm 0, failures arm 0, successes arm 1, failures arm 1].
    for x in [[0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0], [3, 1, 0, 0], [2, 2, 1, 0]] {
        let (q0, q1) = table.action_values(x);
        println!("{x:?}: Q(arm 0) {q0:.4}  Q(arm 1) {q1:.4}");
    }
    Ok(())
}
