use super::{AgentParams, Gradients};
use crate::{Error, Result};

/// RMSProp settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmsProp {
    pub decay: f64,
    pub epsilon: f64,
    /// Gradients are rescaled to at most this global L2 norm before the update.
    pub max_grad_norm: f64,
}

impl Default for RmsProp {
    fn default() -> Self {
        Self { decay: 0.99, epsilon: 1e-6, max_grad_norm: 40.0 }
    }
}

/// Running mean of squared gradients, one entry per parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub config: RmsProp,
    pub accum: Gradients,
}

impl OptimizerState {
    pub fn new(params: &AgentParams, config: RmsProp) -> Self {
        Self { config, accum: params.zeros_like() }
    }

    /// Clips `grads` in place, then applies one RMSProp update to `params`.
    pub fn step(&mut self, params: &mut AgentParams, grads: &mut Gradients, lr: f64) -> Result<()> {
        if grads.shapes() != params.shapes() || self.accum.shapes() != params.shapes() {
            return Err(Error::config("gradient and parameter shapes differ"));
        }
        clip_global_norm(grads, self.config.max_grad_norm);
        let (rho, eps) = (self.config.decay, self.config.epsilon);
        let mut next = params.clone();
        for ((p, &g), acc) in next.iter_mut().zip(grads.iter()).zip(self.accum.iter_mut()) {
            *acc = rho * *acc + (1.0 - rho) * g * g;
            *p -= lr * g / (*acc + eps).sqrt();
        }
        if !next.is_finite() {
            return Err(Error::Divergence { step: 0, what: "non-finite parameter update".into() });
        }
        *params = next;
        Ok(())
    }
}

/// Rescales `grads` so its global norm is at most `max_norm`. Returns the norm before clipping.
pub fn clip_global_norm(grads: &mut Gradients, max_norm: f64) -> f64 {
    let norm = grads.global_norm();
    if norm > max_norm && norm > 0.0 {
        grads.scale(max_norm / norm);
    }
    norm
}
