use super::lstm::{entropy, forward_cached, heads, log_softmax, softmax, StepCache};
use super::{AgentParams, Gradients, LstmState, Trajectory};
use crate::a2c::LossWeights;
use crate::{Error, Result};

/// Unweighted loss components of one trajectory.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LossBreakdown {
    /// `-sum log pi(a_t) * A_t`
    pub policy: f64,
    /// `sum (R_t - V_t)^2`
    pub value: f64,
    /// Entropy bonus `-sum H(pi_t)`.
    pub entropy: f64,
    /// `w_pi * policy + beta_v * value + beta_e * entropy`
    pub total: f64,
}

struct ForwardStep {
    prev: LstmState,
    cache: StepCache,
    probs: Vec<f64>,
    log_probs: Vec<f64>,
    entropy: f64,
    value: f64,
}

fn forward(params: &AgentParams, traj: &Trajectory, weights: &LossWeights) -> Result<(Vec<ForwardStep>, LossBreakdown)> {
    let mut out = Vec::with_capacity(traj.len());
    let mut loss = LossBreakdown::default();
    let Some(first) = traj.steps.first() else {
        return Ok((out, loss));
    };
    let mut state = first.state.clone();
    for (t, step) in traj.steps.iter().enumerate() {
        let cache = forward_cached(params, &state, &step.input)?;
        let (logits, value) = heads(params, &cache.next.h)?;
        let probs = softmax(&logits);
        let log_probs = log_softmax(&logits);
        let ent = entropy(&probs, &log_probs);
        if let Some(a) = step.action {
            if a >= params.actions {
                return Err(Error::InvalidAction(format!("step {t} records action {a} of {}", params.actions)));
            }
            loss.policy -= log_probs[a] * step.advantage;
            loss.entropy -= ent;
        }
        loss.value += (step.ret - value).powi(2);
        if !(loss.policy.is_finite() && loss.value.is_finite() && loss.entropy.is_finite()) {
            return Err(Error::Divergence { step: t, what: "non-finite loss".into() });
        }
        let prev = std::mem::replace(&mut state, cache.next.clone());
        out.push(ForwardStep { prev, cache, probs, log_probs, entropy: ent, value });
    }
    loss.total = weights.policy * loss.policy + weights.value * loss.value + weights.entropy * loss.entropy;
    Ok((out, loss))
}

/// Recomputes the composite actor-critic loss of a trajectory under `params`.
///
/// The recurrent state is threaded from the first step's recorded state;
/// returns and advantages are treated as constants.
pub fn trajectory_loss(params: &AgentParams, traj: &Trajectory, weights: &LossWeights) -> Result<LossBreakdown> {
    forward(params, traj, weights).map(|(_, loss)| loss)
}

/// Gradients of the weighted loss with respect to every parameter, by
/// backpropagation through time over the whole trajectory.
pub fn bptt_gradients(params: &AgentParams, traj: &Trajectory, weights: &LossWeights) -> Result<(Gradients, LossBreakdown)> {
    params.validate()?;
    let (fwd, loss) = forward(params, traj, weights)?;
    let mut g = params.zeros_like();
    let (hid, din, na) = (params.hidden, params.input, params.actions);

    let mut dh_next = vec![0.0; hid];
    let mut dc_next = vec![0.0; hid];
    let mut dh = vec![0.0; hid];
    let mut dgates = vec![0.0; 4 * hid];
    let mut dlogits = vec![0.0; na];

    for (step, f) in traj.steps.iter().zip(&fwd).rev() {
        let h_t = &f.cache.next.h;

        dlogits.iter_mut().for_each(|v| *v = 0.0);
        if let Some(a) = step.action {
            for j in 0..na {
                let onehot = if j == a { 1.0 } else { 0.0 };
                let d_policy = -step.advantage * (onehot - f.probs[j]);
                // d(-H)/dz_j = p_j (ln p_j + H)
                let d_neg_entropy = if f.probs[j] > 0.0 { f.probs[j] * (f.log_probs[j] + f.entropy) } else { 0.0 };
                dlogits[j] = weights.policy * d_policy + weights.entropy * d_neg_entropy;
            }
        }
        let dvalue = -2.0 * weights.value * (step.ret - f.value);

        for j in 0..na {
            let row = &mut g.w_pi[j * hid..(j + 1) * hid];
            for (w, &hk) in row.iter_mut().zip(h_t) {
                *w += dlogits[j] * hk;
            }
            g.b_pi[j] += dlogits[j];
        }
        for (w, &hk) in g.w_v.iter_mut().zip(h_t) {
            *w += dvalue * hk;
        }
        g.b_v[0] += dvalue;

        for k in 0..hid {
            let mut acc = dh_next[k] + params.w_v[k] * dvalue;
            for j in 0..na {
                acc += params.w_pi[j * hid + k] * dlogits[j];
            }
            dh[k] = acc;
        }

        let c = &f.cache;
        for k in 0..hid {
            let (i, fg, gc, o, tc) = (c.input_gate[k], c.forget_gate[k], c.candidate[k], c.output_gate[k], c.tanh_c[k]);
            let dc = dh[k] * o * (1.0 - tc * tc) + dc_next[k];
            dgates[k] = dc * gc * i * (1.0 - i);
            dgates[hid + k] = dc * f.prev.c[k] * fg * (1.0 - fg);
            dgates[2 * hid + k] = dc * i * (1.0 - gc * gc);
            dgates[3 * hid + k] = dh[k] * tc * o * (1.0 - o);
            dc_next[k] = dc * fg;
        }

        dh_next.iter_mut().for_each(|v| *v = 0.0);
        for (row, &dz) in dgates.iter().enumerate() {
            if dz == 0.0 {
                continue;
            }
            for (w, &x) in g.w_ih[row * din..(row + 1) * din].iter_mut().zip(&step.input) {
                *w += dz * x;
            }
            let whh = &params.w_hh[row * hid..(row + 1) * hid];
            for ((w, &hp), (dn, &wr)) in
                g.w_hh[row * hid..(row + 1) * hid].iter_mut().zip(&f.prev.h).zip(dh_next.iter_mut().zip(whh))
            {
                *w += dz * hp;
                *dn += wr * dz;
            }
            g.b_gates[row] += dz;
        }
    }

    if let Some(t) = g.iter().position(|v| !v.is_finite()) {
        return Err(Error::Divergence { step: t, what: "non-finite gradient coordinate".into() });
    }
    Ok((g, loss))
}
