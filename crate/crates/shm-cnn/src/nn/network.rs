//! The fixed five-layer network and its hand-derived backward pass.
//!
//! Architecture, in order:
//!
//! ```text
//! input (6, 1)
//!   -> Conv1d(32 filters, kernel 3, ReLU)   -> (4, 32)
//!   -> MaxPool1d(2)                         -> (2, 32)
//!   -> Flatten                              -> 64
//!   -> Dense(64 -> 16, ReLU)                -> 16
//!   -> Dense(16 -> 1, Sigmoid)              -> probability
//! ```
//!
//! Gradients are derived for exactly this stack (no general autodiff):
//! the sigmoid + binary cross-entropy composite collapses to `p - y` at the
//! output pre-activation, dense layers backpropagate through their weight
//! matrices, the max pool routes each gradient to the argmax position of its
//! window, and the convolution accumulates tap products against the cached
//! input.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nn::feature_map::FeatureMap;
use crate::nn::layers::{Activation, Conv1d, Dense, MaxPool1d};

pub const INPUT_LENGTH: usize = 6;
pub const INPUT_CHANNELS: usize = 1;
pub const CONV_FILTERS: usize = 32;
pub const CONV_KERNEL: usize = 3;
pub const POOL_SIZE: usize = 2;
pub const CONV_OUT_LENGTH: usize = INPUT_LENGTH - CONV_KERNEL + 1; // 4
pub const POOL_OUT_LENGTH: usize = CONV_OUT_LENGTH / POOL_SIZE; // 2
pub const FLAT_DIM: usize = CONV_FILTERS * POOL_OUT_LENGTH; // 64
pub const HIDDEN_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub conv: Conv1d,
    pub pool: MaxPool1d,
    pub hidden: Dense,
    pub output: Dense,
}

/// Cached intermediate activations from one forward pass, consumed by
/// [`Network::backward`]. Holding a trace is proof the forward pass ran, so
/// a backward call can never observe stale or missing activations.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    pub input: FeatureMap,
    conv_pre: FeatureMap,
    conv_post: FeatureMap,
    pool_argmax: Vec<usize>,
    flat: Vec<f64>,
    hidden_pre: Vec<f64>,
    hidden_post: Vec<f64>,
    pub probability: f64,
}

/// One gradient tensor per trainable parameter tensor, identical shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub conv_w: Vec<f64>,
    pub conv_b: Vec<f64>,
    pub hidden_w: Vec<f64>,
    pub hidden_b: Vec<f64>,
    pub output_w: Vec<f64>,
    pub output_b: Vec<f64>,
}

impl Gradients {
    pub fn zeros() -> Self {
        Self {
            conv_w: vec![0.0; CONV_FILTERS * INPUT_CHANNELS * CONV_KERNEL],
            conv_b: vec![0.0; CONV_FILTERS],
            hidden_w: vec![0.0; HIDDEN_DIM * FLAT_DIM],
            hidden_b: vec![0.0; HIDDEN_DIM],
            output_w: vec![0.0; HIDDEN_DIM],
            output_b: vec![0.0; 1],
        }
    }

    pub fn tensors(&self) -> [&[f64]; 6] {
        [
            &self.conv_w,
            &self.conv_b,
            &self.hidden_w,
            &self.hidden_b,
            &self.output_w,
            &self.output_b,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Vec<f64>; 6] {
        [
            &mut self.conv_w,
            &mut self.conv_b,
            &mut self.hidden_w,
            &mut self.hidden_b,
            &mut self.output_w,
            &mut self.output_b,
        ]
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (mine, theirs) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                *a += b;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for tensor in self.tensors_mut() {
            for g in tensor.iter_mut() {
                *g *= factor;
            }
        }
    }

    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }
}

impl Network {
    /// Deterministic Glorot-uniform initialization from a seed; biases start
    /// at zero. Layers are initialized in network order so the draw sequence
    /// is part of the reproducibility contract.
    pub fn init(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = Self {
            conv: Conv1d::init(
                CONV_FILTERS,
                INPUT_CHANNELS,
                CONV_KERNEL,
                Activation::Relu,
                &mut rng,
            ),
            pool: MaxPool1d::new(POOL_SIZE),
            hidden: Dense::init(FLAT_DIM, HIDDEN_DIM, Activation::Relu, &mut rng),
            output: Dense::init(HIDDEN_DIM, 1, Activation::Sigmoid, &mut rng),
        };
        net.assert_architecture();
        net
    }

    /// All-zero parameters; forward output is exactly 0.5 on any input.
    pub fn zeros() -> Self {
        let net = Self {
            conv: Conv1d::zeros(CONV_FILTERS, INPUT_CHANNELS, CONV_KERNEL, Activation::Relu),
            pool: MaxPool1d::new(POOL_SIZE),
            hidden: Dense::zeros(FLAT_DIM, HIDDEN_DIM, Activation::Relu),
            output: Dense::zeros(HIDDEN_DIM, 1, Activation::Sigmoid),
        };
        net.assert_architecture();
        net
    }

    /// The shape chain (6,1) -> (4,32) -> (2,32) -> 64 -> 16 -> 1 is a
    /// construction-time invariant.
    pub fn assert_architecture(&self) {
        assert_eq!(self.conv.in_channels, INPUT_CHANNELS);
        assert_eq!(self.conv.filters, CONV_FILTERS);
        assert_eq!(self.conv.kernel, CONV_KERNEL);
        assert_eq!(self.conv.output_length(INPUT_LENGTH), CONV_OUT_LENGTH);
        assert_eq!(self.pool.pool, POOL_SIZE);
        assert_eq!(self.pool.output_length(CONV_OUT_LENGTH), POOL_OUT_LENGTH);
        assert_eq!(self.hidden.in_dim, FLAT_DIM);
        assert_eq!(self.hidden.out_dim, HIDDEN_DIM);
        assert_eq!(self.output.in_dim, HIDDEN_DIM);
        assert_eq!(self.output.out_dim, 1);
    }

    fn check_input(&self, sample: &FeatureMap) -> Result<()> {
        if sample.channels() != INPUT_CHANNELS || sample.length() != INPUT_LENGTH {
            return Err(Error::Config(format!(
                "network input must be ({INPUT_LENGTH}, {INPUT_CHANNELS}), got ({}, {})",
                sample.length(),
                sample.channels()
            )));
        }
        Ok(())
    }

    /// Forward pass returning the damage probability, strictly inside (0,1).
    pub fn forward(&self, sample: &FeatureMap) -> Result<f64> {
        Ok(self.forward_trace(sample)?.probability)
    }

    /// Forward pass that caches every intermediate needed by `backward`.
    pub fn forward_trace(&self, sample: &FeatureMap) -> Result<ForwardTrace> {
        self.check_input(sample)?;
        let conv_pre = self.conv.convolve(sample)?;
        let conv_post = FeatureMap::new(
            conv_pre.channels(),
            conv_pre.length(),
            conv_pre
                .values()
                .iter()
                .map(|&z| self.conv.activation.apply(z))
                .collect(),
        )?;
        let (pool_out, pool_argmax) = self.pool.forward_with_argmax(&conv_post)?;
        debug_assert_eq!(pool_out.channels(), CONV_FILTERS);
        debug_assert_eq!(pool_out.length(), POOL_OUT_LENGTH);
        let flat = pool_out.flatten();
        debug_assert_eq!(flat.len(), FLAT_DIM);
        let hidden_pre = self.hidden.affine(&flat)?;
        let hidden_post: Vec<f64> = hidden_pre
            .iter()
            .map(|&z| self.hidden.activation.apply(z))
            .collect();
        let out_pre = self.output.affine(&hidden_post)?[0];
        // A saturated sigmoid rounds to exactly 0.0 or 1.0 in f64; clamp to
        // the nearest representable values so the output stays strictly
        // inside (0, 1).
        let probability = self
            .output
            .activation
            .apply(out_pre)
            .clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
        debug_assert!(probability > 0.0 && probability < 1.0);
        Ok(ForwardTrace {
            input: sample.clone(),
            conv_pre,
            conv_post,
            pool_argmax,
            flat,
            hidden_pre,
            hidden_post,
            probability,
        })
    }

    /// Gradient of the binary cross-entropy loss with respect to every
    /// trainable parameter, for the sample cached in `trace`.
    pub fn backward(&self, trace: &ForwardTrace, label: u8) -> Gradients {
        let mut grads = Gradients::zeros();

        // Sigmoid + BCE composite: dLoss/d(output pre-activation) = p - y.
        let delta_out = trace.probability - f64::from(label);

        grads.output_b[0] = delta_out;
        for (i, g) in grads.output_w.iter_mut().enumerate() {
            *g = delta_out * trace.hidden_post[i];
        }

        // Hidden dense layer.
        let mut delta_hidden = vec![0.0; HIDDEN_DIM];
        for o in 0..HIDDEN_DIM {
            let upstream = delta_out * self.output.weights[o];
            delta_hidden[o] = upstream * self.hidden.activation.derivative(trace.hidden_pre[o]);
        }
        for o in 0..HIDDEN_DIM {
            let d = delta_hidden[o];
            grads.hidden_b[o] = d;
            let row = &mut grads.hidden_w[o * FLAT_DIM..(o + 1) * FLAT_DIM];
            for (i, g) in row.iter_mut().enumerate() {
                *g = d * trace.flat[i];
            }
        }

        // Back through flatten into the pooled map (channel-major layout).
        let mut delta_flat = vec![0.0; FLAT_DIM];
        for (i, d) in delta_flat.iter_mut().enumerate() {
            let mut acc = 0.0;
            for o in 0..HIDDEN_DIM {
                acc += delta_hidden[o] * self.hidden.weights[o * FLAT_DIM + i];
            }
            *d = acc;
        }

        // Max pool routes each pooled gradient to its argmax input position.
        let mut delta_conv_post = vec![0.0; CONV_FILTERS * CONV_OUT_LENGTH];
        for f in 0..CONV_FILTERS {
            for q in 0..POOL_OUT_LENGTH {
                let src = trace.pool_argmax[f * POOL_OUT_LENGTH + q];
                delta_conv_post[f * CONV_OUT_LENGTH + src] += delta_flat[f * POOL_OUT_LENGTH + q];
            }
        }

        // Conv layer: ReLU derivative on the pre-activation, then accumulate
        // weight gradients against the cached input.
        for f in 0..CONV_FILTERS {
            for p in 0..CONV_OUT_LENGTH {
                let delta_pre = delta_conv_post[f * CONV_OUT_LENGTH + p]
                    * self.conv.activation.derivative(trace.conv_pre.get(f, p));
                if delta_pre == 0.0 {
                    continue;
                }
                grads.conv_b[f] += delta_pre;
                for c in 0..INPUT_CHANNELS {
                    let row = trace.input.channel(c);
                    for t in 0..CONV_KERNEL {
                        grads.conv_w[(f * INPUT_CHANNELS + c) * CONV_KERNEL + t] +=
                            delta_pre * row[p + t];
                    }
                }
            }
        }

        grads
    }

    /// References to the six trainable tensors, in the same order as
    /// [`Gradients::tensors`].
    pub fn tensors_mut(&mut self) -> [&mut Vec<f64>; 6] {
        [
            &mut self.conv.weights,
            &mut self.conv.biases,
            &mut self.hidden.weights,
            &mut self.hidden.biases,
            &mut self.output.weights,
            &mut self.output.biases,
        ]
    }

    pub fn tensors(&self) -> [&[f64]; 6] {
        [
            &self.conv.weights,
            &self.conv.biases,
            &self.hidden.weights,
            &self.hidden.biases,
            &self.output.weights,
            &self.output.biases,
        ]
    }

    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }
}
