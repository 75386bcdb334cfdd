use std::fmt;
use std::str::FromStr;

use super::optimize::{nelder_mead, NelderMead};
use crate::a2c::EpisodeRecord;
use crate::baselines::rw_choice_probs;
use crate::envs::{Regime, TaskRecord};
use crate::{Error, Result};

pub const ALPHA_BOUNDS: (f64, f64) = (0.01, 0.99);
pub const BETA_BOUNDS: (f64, f64) = (0.01, 200.0);
pub const EPSILON_BOUNDS: (f64, f64) = (0.0, 0.5);
/// Learning rate used when it is not a free parameter.
pub const FIXED_ALPHA: f64 = 0.5;
/// Lapse rate used when it is not a free parameter.
pub const FIXED_EPSILON: f64 = 0.0;

/// Which Rescorla-Wagner parameters are free; `β` always is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RwModel {
    B,
    AB,
    BE,
    ABE,
}

impl RwModel {
    pub const ALL: [RwModel; 4] = [RwModel::B, RwModel::AB, RwModel::BE, RwModel::ABE];

    pub fn tag(self) -> &'static str {
        match self {
            RwModel::B => "b",
            RwModel::AB => "ab",
            RwModel::BE => "be",
            RwModel::ABE => "abe",
        }
    }

    pub fn free_alpha(self) -> bool {
        matches!(self, RwModel::AB | RwModel::ABE)
    }

    pub fn free_epsilon(self) -> bool {
        matches!(self, RwModel::BE | RwModel::ABE)
    }

    /// Number of free parameters.
    pub fn k(self) -> usize {
        1 + self.free_alpha() as usize + self.free_epsilon() as usize
    }
}

impl fmt::Display for RwModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for RwModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RwModel::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| Error::config(format!("unknown R-W model `{s}` (expected b, ab, be or abe)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwParams {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: RwModel,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub loglik: f64,
    pub bic: f64,
    /// Number of fitted choices.
    pub n: usize,
    /// Number of free parameters.
    pub k: usize,
    pub block: usize,
    /// Regime shared by every episode of the block, if any.
    pub volatility: Option<Regime>,
    /// Every choice in the block was the same action.
    pub degenerate: bool,
}

impl FitResult {
    pub fn params(&self) -> RwParams {
        RwParams { alpha: self.alpha, beta: self.beta, epsilon: self.epsilon }
    }
}

/// `k ln n - 2 lnL`
pub fn bic(loglik: f64, k: usize, n: usize) -> f64 {
    k as f64 * (n as f64).ln() - 2.0 * loglik
}

/// Episodes as `(action, reward)` sequences; reward is summed over any
/// non-decision steps that follow a choice.
fn choices(records: &[EpisodeRecord]) -> Result<(Vec<Vec<(usize, f64)>>, usize)> {
    let arms = records.first().map(|r| r.task.num_arms()).unwrap_or(2);
    let mut out = Vec::with_capacity(records.len());
    for rec in records {
        if rec.task.num_arms() != arms {
            return Err(Error::InvalidRecord("block mixes tasks with different arm counts".into()));
        }
        let mut ep: Vec<(usize, f64)> = Vec::with_capacity(rec.steps.len());
        for s in &rec.steps {
            match s.action {
                Some(a) if a < arms => ep.push((a, s.reward)),
                Some(a) => return Err(Error::ArmOutOfRange { arm: a, arms }),
                None => match ep.last_mut() {
                    Some(last) => last.1 += s.reward,
                    None => return Err(Error::InvalidRecord("non-decision step before any choice".into())),
                },
            }
        }
        out.push(ep);
    }
    Ok((out, arms))
}

fn loglik(data: &[Vec<(usize, f64)>], arms: usize, p: RwParams) -> f64 {
    let mut ll = 0.0;
    let mut q = vec![0.0; arms];
    for ep in data {
        q.fill(0.5);
        for &(a, r) in ep {
            ll += rw_choice_probs(&q, p.beta, p.epsilon)[a].max(f64::MIN_POSITIVE).ln();
            q[a] += p.alpha * (r - q[a]);
        }
    }
    ll
}

/// Choice log-likelihood of a Rescorla-Wagner learner with softmax and lapse.
/// Values start at 0.5 at the beginning of every episode.
pub fn rw_log_likelihood(records: &[EpisodeRecord], params: &RwParams) -> Result<f64> {
    let (data, arms) = choices(records)?;
    Ok(loglik(&data, arms, *params))
}

/// Free-parameter vector; `β` is searched on a log scale.
fn pack(model: RwModel, p: RwParams) -> Vec<f64> {
    let mut x = vec![p.beta.ln()];
    if model.free_alpha() {
        x.push(p.alpha);
    }
    if model.free_epsilon() {
        x.push(p.epsilon);
    }
    x
}

fn unpack(model: RwModel, x: &[f64]) -> RwParams {
    let mut it = x.iter().copied();
    let beta = it.next().unwrap_or(0.0).exp().clamp(BETA_BOUNDS.0, BETA_BOUNDS.1);
    let alpha =
        if model.free_alpha() { it.next().unwrap_or(FIXED_ALPHA).clamp(ALPHA_BOUNDS.0, ALPHA_BOUNDS.1) } else { FIXED_ALPHA };
    let epsilon =
        if model.free_epsilon() { it.next().unwrap_or(0.0).clamp(EPSILON_BOUNDS.0, EPSILON_BOUNDS.1) } else { FIXED_EPSILON };
    RwParams { alpha, beta, epsilon }
}

fn grid(model: RwModel) -> Vec<RwParams> {
    let alphas: Vec<f64> = if model.free_alpha() { (1..=19).map(|i| i as f64 * 0.05).collect() } else { vec![FIXED_ALPHA] };
    let epsilons: Vec<f64> = if model.free_epsilon() { (0..=10).map(|i| i as f64 * 0.05).collect() } else { vec![FIXED_EPSILON] };
    // 0.1 .. 100, four points per decade
    let betas: Vec<f64> = (0..=12).map(|i| 10f64.powf(-1.0 + i as f64 * 0.25)).collect();
    let mut out = Vec::with_capacity(alphas.len() * epsilons.len() * betas.len());
    for &alpha in &alphas {
        for &epsilon in &epsilons {
            for &beta in &betas {
                out.push(RwParams { alpha, beta, epsilon });
            }
        }
    }
    out
}

/// Maximum-likelihood fit of one block: a coarse grid, then simplex
/// refinement from the three best grid points, all within the bounds.
pub fn fit_rw(records: &[EpisodeRecord], model: RwModel, block: usize) -> Result<FitResult> {
    let (data, arms) = choices(records)?;
    let n: usize = data.iter().map(Vec::len).sum();
    if n == 0 {
        return Err(Error::InvalidRecord(format!("block {block} has no choices")));
    }
    let first = data.iter().flatten().next().map(|c| c.0);
    let degenerate = data.iter().flatten().all(|c| Some(c.0) == first);

    let mut scored: Vec<(f64, RwParams)> = grid(model).into_iter().map(|p| (loglik(&data, arms, p), p)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (mut best_ll, mut best) = scored[0];
    let cfg = NelderMead { max_iters: 300, f_tol: 1e-9, step: 0.1 };
    for &(_, start) in scored.iter().take(3) {
        let (x, neg) = nelder_mead(|x| -loglik(&data, arms, unpack(model, x)), &pack(model, start), cfg);
        if -neg > best_ll {
            best_ll = -neg;
            best = unpack(model, &x);
        }
    }

    let regimes: Vec<Option<Regime>> = records
        .iter()
        .map(|r| match &r.task {
            TaskRecord::Restless { regime, .. } => Some(*regime),
            _ => None,
        })
        .collect();
    let volatility = match regimes.first() {
        Some(&Some(r)) if regimes.iter().all(|&x| x == Some(r)) => Some(r),
        _ => None,
    };

    Ok(FitResult {
        model,
        alpha: best.alpha,
        beta: best.beta,
        epsilon: best.epsilon,
        loglik: best_ll,
        bic: bic(best_ll, model.k(), n),
        n,
        k: model.k(),
        block,
        volatility,
        degenerate,
    })
}
