use rand::Rng as _;

use crate::{Error, Result};

/// Row-major shape of one parameter tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub rows: usize,
    pub cols: usize,
}

impl Shape {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// All trainable weights of the actor-critic.
///
/// Gate blocks inside the LSTM tensors are ordered input, forget, candidate,
/// output; each block spans `hidden` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentParams {
    pub hidden: usize,
    pub input: usize,
    pub actions: usize,
    /// `4H x D`
    pub w_ih: Vec<f64>,
    /// `4H x H`
    pub w_hh: Vec<f64>,
    /// `4H`
    pub b_gates: Vec<f64>,
    /// `A x H`
    pub w_pi: Vec<f64>,
    /// `A`
    pub b_pi: Vec<f64>,
    /// `1 x H`
    pub w_v: Vec<f64>,
    /// `1`
    pub b_v: Vec<f64>,
}

/// Gradients share the parameter layout.
pub type Gradients = AgentParams;

pub(crate) const TENSOR_NAMES: [&str; 7] = ["w_ih", "w_hh", "b_gates", "w_pi", "b_pi", "w_v", "b_v"];

impl AgentParams {
    pub fn zeros(hidden: usize, input: usize, actions: usize) -> Self {
        let g = 4 * hidden;
        Self {
            hidden,
            input,
            actions,
            w_ih: vec![0.0; g * input],
            w_hh: vec![0.0; g * hidden],
            b_gates: vec![0.0; g],
            w_pi: vec![0.0; actions * hidden],
            b_pi: vec![0.0; actions],
            w_v: vec![0.0; hidden],
            b_v: vec![0.0; 1],
        }
    }

    /// Uniform `[-1/sqrt(fan_in), 1/sqrt(fan_in)]` weights, forget-gate bias 1, other biases 0.
    pub fn init(hidden: usize, input: usize, actions: usize, rng: &mut crate::Rng) -> Self {
        let mut p = Self::zeros(hidden, input, actions);
        let lstm_bound = 1.0 / ((input + hidden).max(1) as f64).sqrt();
        let head_bound = 1.0 / (hidden.max(1) as f64).sqrt();
        for w in p.w_ih.iter_mut().chain(p.w_hh.iter_mut()) {
            *w = rng.random_range(-lstm_bound..=lstm_bound);
        }
        for w in p.w_pi.iter_mut().chain(p.w_v.iter_mut()) {
            *w = rng.random_range(-head_bound..=head_bound);
        }
        for b in &mut p.b_gates[hidden..2 * hidden] {
            *b = 1.0;
        }
        p
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.hidden, self.input, self.actions)
    }

    pub fn shapes(&self) -> [Shape; 7] {
        let (h, d, a) = (self.hidden, self.input, self.actions);
        [
            Shape { rows: 4 * h, cols: d },
            Shape { rows: 4 * h, cols: h },
            Shape { rows: 4 * h, cols: 1 },
            Shape { rows: a, cols: h },
            Shape { rows: a, cols: 1 },
            Shape { rows: 1, cols: h },
            Shape { rows: 1, cols: 1 },
        ]
    }

    pub fn tensors(&self) -> [&[f64]; 7] {
        [&self.w_ih, &self.w_hh, &self.b_gates, &self.w_pi, &self.b_pi, &self.w_v, &self.b_v]
    }

    pub fn tensors_mut(&mut self) -> [&mut Vec<f64>; 7] {
        [&mut self.w_ih, &mut self.w_hh, &mut self.b_gates, &mut self.w_pi, &mut self.b_pi, &mut self.w_v, &mut self.b_v]
    }

    pub fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        let [a, b, c, d, e, f, g] = self.tensors();
        a.iter().chain(b).chain(c).chain(d).chain(e).chain(f).chain(g)
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.w_ih
            .iter_mut()
            .chain(self.w_hh.iter_mut())
            .chain(self.b_gates.iter_mut())
            .chain(self.w_pi.iter_mut())
            .chain(self.b_pi.iter_mut())
            .chain(self.w_v.iter_mut())
            .chain(self.b_v.iter_mut())
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }

    pub fn global_norm(&self) -> f64 {
        self.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `self += scale * other`
    pub fn add_scaled(&mut self, other: &Self, scale: f64) {
        for (a, b) in self.iter_mut().zip(other.iter()) {
            *a += scale * b;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self.iter_mut() {
            *v *= factor;
        }
    }

    /// Checks internal tensor lengths against the declared dimensions.
    pub fn validate(&self) -> Result<()> {
        for ((name, shape), t) in TENSOR_NAMES.iter().zip(self.shapes()).zip(self.tensors()) {
            if shape.len() != t.len() {
                return Err(Error::config(format!(
                    "tensor {name} has {} entries, expected {}x{}",
                    t.len(),
                    shape.rows,
                    shape.cols
                )));
            }
        }
        if !self.is_finite() {
            return Err(Error::config("parameters contain non-finite entries"));
        }
        Ok(())
    }
}
