use rand::Rng as _;

use super::AgentParams;
use crate::{Error, Result};

/// Recurrent state carried between steps; all-zero at the start of every episode.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub c: Vec<f64>,
    pub h: Vec<f64>,
}

impl LstmState {
    pub fn zeros(hidden: usize) -> Self {
        Self { c: vec![0.0; hidden], h: vec![0.0; hidden] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().chain(&self.h).all(|&v| v == 0.0)
    }
}

/// Activations kept from a forward step so the backward pass need not recompute them.
#[derive(Debug, Clone)]
pub struct StepCache {
    pub input_gate: Vec<f64>,
    pub forget_gate: Vec<f64>,
    pub candidate: Vec<f64>,
    pub output_gate: Vec<f64>,
    pub tanh_c: Vec<f64>,
    pub next: LstmState,
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_dims(params: &AgentParams, state: &LstmState, input: &[f64]) -> Result<()> {
    if input.len() != params.input {
        return Err(Error::config(format!("input has width {}, network expects {}", input.len(), params.input)));
    }
    if state.c.len() != params.hidden || state.h.len() != params.hidden {
        return Err(Error::config(format!(
            "recurrent state has width {}/{}, network expects {}",
            state.c.len(),
            state.h.len(),
            params.hidden
        )));
    }
    Ok(())
}

pub(crate) fn forward_cached(params: &AgentParams, state: &LstmState, input: &[f64]) -> Result<StepCache> {
    check_dims(params, state, input)?;
    let (h, d) = (params.hidden, params.input);
    let mut z = params.b_gates.clone();
    for (row, zr) in z.iter_mut().enumerate() {
        *zr += dot(&params.w_ih[row * d..(row + 1) * d], input) + dot(&params.w_hh[row * h..(row + 1) * h], &state.h);
    }
    let input_gate: Vec<f64> = z[..h].iter().map(|&v| sigmoid(v)).collect();
    let forget_gate: Vec<f64> = z[h..2 * h].iter().map(|&v| sigmoid(v)).collect();
    let candidate: Vec<f64> = z[2 * h..3 * h].iter().map(|v| v.tanh()).collect();
    let output_gate: Vec<f64> = z[3 * h..].iter().map(|&v| sigmoid(v)).collect();
    let c: Vec<f64> = (0..h).map(|k| forget_gate[k] * state.c[k] + input_gate[k] * candidate[k]).collect();
    let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
    let hn: Vec<f64> = (0..h).map(|k| output_gate[k] * tanh_c[k]).collect();
    Ok(StepCache { input_gate, forget_gate, candidate, output_gate, tanh_c, next: LstmState { c, h: hn } })
}

/// One LSTM step. Returns the new hidden vector (the cell output) and the next state.
pub fn lstm_forward(params: &AgentParams, state: &LstmState, input: &[f64]) -> Result<(Vec<f64>, LstmState)> {
    let cache = forward_cached(params, state, input)?;
    Ok((cache.next.h.clone(), cache.next))
}

/// Affine policy and value heads on top of the LSTM output.
pub fn heads(params: &AgentParams, h: &[f64]) -> Result<(Vec<f64>, f64)> {
    if h.len() != params.hidden {
        return Err(Error::config(format!("hidden vector has width {}, network expects {}", h.len(), params.hidden)));
    }
    let hid = params.hidden;
    let logits = (0..params.actions).map(|a| params.b_pi[a] + dot(&params.w_pi[a * hid..(a + 1) * hid], h)).collect();
    let value = params.b_v[0] + dot(&params.w_v, h);
    Ok((logits, value))
}

/// Max-subtracted softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Log-probabilities computed with the log-sum-exp trick.
pub(crate) fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|&z| (z - max).exp()).sum::<f64>().ln();
    logits.iter().map(|&z| z - lse).collect()
}

/// Policy entropy `-sum p ln p`, with `0 ln 0 = 0`.
pub(crate) fn entropy(probs: &[f64], log_probs: &[f64]) -> f64 {
    let h: f64 = probs.iter().zip(log_probs).filter(|(p, _)| **p > 0.0).map(|(p, lp)| -p * lp).sum();
    h.max(0.0)
}

/// Samples an action from the categorical defined by `logits`.
///
/// Returns the action, its log-probability and the policy entropy.
pub fn softmax_sample(logits: &[f64], rng: &mut crate::Rng) -> (usize, f64, f64) {
    let probs = softmax(logits);
    let log_probs = log_softmax(logits);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut action = probs.len() - 1;
    for (a, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            action = a;
            break;
        }
    }
    // Never return a zero-probability action from floating-point slack in the last bucket.
    while probs[action] == 0.0 && action > 0 {
        action -= 1;
    }
    (action, log_probs[action].min(0.0), entropy(&probs, &log_probs))
}
