/// Picks the first unpulled arm if any, else `argmax mean_i + sqrt(chi ln t / n_i)`.
/// Ties go to the lower index.
pub fn ucb_choose(counts: &[usize], means: &[f64], t: usize, chi: f64) -> usize {
    if let Some(a) = counts.iter().position(|&n| n == 0) {
        return a;
    }
    let log_t = (t.max(1) as f64).ln();
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (a, (&n, &m)) in counts.iter().zip(means).enumerate() {
        let score = m + (chi * log_t / n as f64).sqrt();
        if score > best_score {
            best = a;
            best_score = score;
        }
    }
    best
}
