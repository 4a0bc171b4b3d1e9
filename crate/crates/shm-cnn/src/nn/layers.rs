//! Layer definitions and forward passes.
//!
//! Three layer kinds cover the whole network: a valid-padding stride-1
//! 1-D convolution, a non-overlapping max pool, and a dense (fully
//! connected) layer. Weight layouts are documented on each type because the
//! model file serializes them in exactly that order.

use rand::Rng;

use crate::error::{Error, Result};
use crate::nn::feature_map::FeatureMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Sigmoid,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => sigmoid(x),
        }
    }

    /// Derivative with respect to the pre-activation value.
    /// ReLU uses subgradient 0 at exactly 0.
    pub fn derivative(self, pre: f64) -> f64 {
        match self {
            Activation::Relu => {
                if pre > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => {
                let s = sigmoid(pre);
                s * (1.0 - s)
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "relu" => Ok(Activation::Relu),
            "sigmoid" => Ok(Activation::Sigmoid),
            other => Err(Error::Data(format!("unknown activation `{other}`"))),
        }
    }
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Glorot-uniform limit: weights drawn from ±sqrt(6 / (fan_in + fan_out)).
fn glorot_limit(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

fn uniform_in(rng: &mut impl Rng, limit: f64) -> f64 {
    (rng.random::<f64>() * 2.0 - 1.0) * limit
}

/// 1-D convolution, valid padding, stride 1, with a fused activation.
///
/// Weight layout: `weights[f * in_channels * kernel + c * kernel + t]` for
/// filter `f`, input channel `c`, tap `t`. Output length is
/// `input length - kernel + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Conv1d {
    pub filters: usize,
    pub in_channels: usize,
    pub kernel: usize,
    pub activation: Activation,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Conv1d {
    pub fn init(
        filters: usize,
        in_channels: usize,
        kernel: usize,
        activation: Activation,
        rng: &mut impl Rng,
    ) -> Self {
        let fan_in = in_channels * kernel;
        let fan_out = filters * kernel;
        let limit = glorot_limit(fan_in, fan_out);
        let weights = (0..filters * in_channels * kernel)
            .map(|_| uniform_in(rng, limit))
            .collect();
        Self {
            filters,
            in_channels,
            kernel,
            activation,
            weights,
            biases: vec![0.0; filters],
        }
    }

    pub fn zeros(filters: usize, in_channels: usize, kernel: usize, activation: Activation) -> Self {
        Self {
            filters,
            in_channels,
            kernel,
            activation,
            weights: vec![0.0; filters * in_channels * kernel],
            biases: vec![0.0; filters],
        }
    }

    pub fn weight(&self, filter: usize, channel: usize, tap: usize) -> f64 {
        self.weights[(filter * self.in_channels + channel) * self.kernel + tap]
    }

    pub fn output_length(&self, input_length: usize) -> usize {
        input_length - self.kernel + 1
    }

    fn check_input(&self, input: &FeatureMap) -> Result<()> {
        if input.channels() != self.in_channels {
            return Err(Error::Config(format!(
                "conv1d expects {} input channels, got {}",
                self.in_channels,
                input.channels()
            )));
        }
        if input.length() < self.kernel {
            return Err(Error::Config(format!(
                "conv1d kernel {} needs input length >= {}, got {}",
                self.kernel,
                self.kernel,
                input.length()
            )));
        }
        Ok(())
    }

    /// Affine part of the layer (weights and bias, no activation).
    pub fn convolve(&self, input: &FeatureMap) -> Result<FeatureMap> {
        self.check_input(input)?;
        let out_len = self.output_length(input.length());
        let mut out = FeatureMap::zeros(self.filters, out_len);
        for f in 0..self.filters {
            for p in 0..out_len {
                let mut acc = self.biases[f];
                for c in 0..self.in_channels {
                    let row = input.channel(c);
                    for t in 0..self.kernel {
                        acc += self.weight(f, c, t) * row[p + t];
                    }
                }
                out.set(f, p, acc);
            }
        }
        Ok(out)
    }

    pub fn forward(&self, input: &FeatureMap) -> Result<FeatureMap> {
        let pre = self.convolve(input)?;
        let values = pre.values().iter().map(|&z| self.activation.apply(z)).collect();
        FeatureMap::new(self.filters, pre.length(), values)
    }
}

/// Non-overlapping max pool. With pool size = stride = 2 the output length is
/// `floor(input length / 2)`; an odd trailing element is dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxPool1d {
    pub pool: usize,
    pub stride: usize,
}

impl MaxPool1d {
    pub fn new(pool: usize) -> Self {
        Self { pool, stride: pool }
    }

    pub fn output_length(&self, input_length: usize) -> usize {
        input_length / self.stride
    }

    pub fn forward(&self, input: &FeatureMap) -> Result<FeatureMap> {
        Ok(self.forward_with_argmax(input)?.0)
    }

    /// Forward pass that also records, per output cell, the input index the
    /// maximum came from (first index on ties) for gradient routing.
    pub fn forward_with_argmax(&self, input: &FeatureMap) -> Result<(FeatureMap, Vec<usize>)> {
        if input.length() < self.pool {
            return Err(Error::Config(format!(
                "maxpool1d pool {} needs input length >= {}, got {}",
                self.pool,
                self.pool,
                input.length()
            )));
        }
        let out_len = self.output_length(input.length());
        let mut out = FeatureMap::zeros(input.channels(), out_len);
        let mut argmax = vec![0usize; input.channels() * out_len];
        for c in 0..input.channels() {
            let row = input.channel(c);
            for q in 0..out_len {
                let start = q * self.stride;
                let mut best = row[start];
                let mut best_idx = start;
                for i in start + 1..start + self.pool {
                    if row[i] > best {
                        best = row[i];
                        best_idx = i;
                    }
                }
                out.set(c, q, best);
                argmax[c * out_len + q] = best_idx;
            }
        }
        Ok((out, argmax))
    }
}

/// Dense layer `y = activation(W x + b)`.
///
/// Weight layout: row-major `weights[o * in_dim + i]` for output neuron `o`,
/// input `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Dense {
    pub fn init(in_dim: usize, out_dim: usize, activation: Activation, rng: &mut impl Rng) -> Self {
        let limit = glorot_limit(in_dim, out_dim);
        let weights = (0..in_dim * out_dim).map(|_| uniform_in(rng, limit)).collect();
        Self {
            in_dim,
            out_dim,
            activation,
            weights,
            biases: vec![0.0; out_dim],
        }
    }

    pub fn zeros(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        Self {
            in_dim,
            out_dim,
            activation,
            weights: vec![0.0; in_dim * out_dim],
            biases: vec![0.0; out_dim],
        }
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.in_dim {
            return Err(Error::Config(format!(
                "dense layer expects input dimension {}, got {}",
                self.in_dim,
                input.len()
            )));
        }
        Ok(())
    }

    /// Pre-activation `W x + b`.
    pub fn affine(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut out = Vec::with_capacity(self.out_dim);
        for o in 0..self.out_dim {
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            let mut acc = self.biases[o];
            for (w, x) in row.iter().zip(input) {
                acc += w * x;
            }
            out.push(acc);
        }
        Ok(out)
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        let mut pre = self.affine(input)?;
        for z in &mut pre {
            *z = self.activation.apply(*z);
        }
        Ok(pre)
    }
}
