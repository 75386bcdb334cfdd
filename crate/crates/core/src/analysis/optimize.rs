/// Nelder-Mead simplex settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub max_iters: usize,
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
    /// Initial simplex edge, per coordinate, as given.
    pub step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { max_iters: 400, f_tol: 1e-10, step: 0.1 }
    }
}

/// Minimises `f` from `start`. Returns the best point and value found; the
/// value is never worse than `f(start)`.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, start: &[f64], cfg: NelderMead) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += cfg.step;
        let v = f(&p);
        simplex.push((p, v));
    }
    if n == 0 {
        return simplex.swap_remove(0);
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));

    for _ in 0..cfg.max_iters {
        order(&mut simplex);
        if (simplex[n].1 - simplex[0].1).abs() < cfg.f_tol {
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|(p, _)| p[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect() };
        let reflected = along(1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(2.0);
            let fe = f(&expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = if fr < simplex[n].1 { along(0.5) } else { along(-0.5) };
            let fc = f(&contracted);
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for (p, v) in simplex.iter_mut().skip(1) {
                    for (x, b) in p.iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    *v = f(p);
                }
            }
        }
    }
    order(&mut simplex);
    simplex.swap_remove(0)
}
