//! Adam optimizer with bias correction.

use crate::nn::network::{Gradients, Network};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Per-parameter first and second moment accumulators plus the step counter.
/// Moments start at zero; `t` increments by exactly one per batch update.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub config: AdamConfig,
    first_moment: Gradients,
    second_moment: Gradients,
    pub t: u64,
}

impl AdamState {
    pub fn new(config: AdamConfig) -> Self {
        Self {
            config,
            first_moment: Gradients::zeros(),
            second_moment: Gradients::zeros(),
            t: 0,
        }
    }

    /// One descent step:
    ///
    /// ```text
    /// t     += 1
    /// m     = b1*m + (1-b1)*g          mhat = m / (1 - b1^t)
    /// v     = b2*v + (1-b2)*g^2        vhat = v / (1 - b2^t)
    /// theta -= lr * mhat / (sqrt(vhat) + eps)
    /// ```
    ///
    /// Parameters move opposite the loss gradient.
    pub fn step(&mut self, net: &mut Network, grads: &Gradients) {
        self.t += 1;
        let t = self.t as i32;
        let c = self.config;
        let bias1 = 1.0 - c.beta1.powi(t);
        let bias2 = 1.0 - c.beta2.powi(t);

        let params = net.tensors_mut();
        let m_tensors = self.first_moment.tensors_mut();
        let v_tensors = self.second_moment.tensors_mut();
        let g_tensors = grads.tensors();

        for (((theta, m), v), g) in params
            .into_iter()
            .zip(m_tensors)
            .zip(v_tensors)
            .zip(g_tensors)
        {
            debug_assert_eq!(theta.len(), g.len());
            for i in 0..theta.len() {
                m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
                v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
                let m_hat = m[i] / bias1;
                let v_hat = v[i] / bias2;
                theta[i] -= c.learning_rate * m_hat / (v_hat.sqrt() + c.epsilon);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        let mut net = Network::init(9);
        let before = net.clone();
        let mut state = AdamState::new(AdamConfig::default());
        state.step(&mut net, &Gradients::zeros());
        assert_eq!(net, before);
        assert_eq!(state.t, 1);
    }

    #[test]
    fn first_step_is_normalized_sign_step() {
        // From zero moments with gradient g: mhat = g, vhat = g^2, so the
        // update is -lr * g / (|g| + eps), essentially -lr * sign(g).
        let cfg = AdamConfig::default();
        let mut net = Network::zeros();
        let w0 = net.conv.weights[0];
        let mut grads = Gradients::zeros();
        let g = 0.037;
        grads.conv_w[0] = g;
        let mut state = AdamState::new(cfg);
        state.step(&mut net, &grads);
        let expected = w0 - cfg.learning_rate * g / (g.abs() + cfg.epsilon);
        assert!((net.conv.weights[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn constant_gradient_matches_hand_iterated_recurrence() {
        // Drive a single parameter with a constant gradient for 1000 steps
        // and compare against an independent scalar recurrence.
        let cfg = AdamConfig::default();
        let g = -0.25;
        let mut net = Network::zeros();
        let mut grads = Gradients::zeros();
        grads.hidden_b[3] = g;
        let mut state = AdamState::new(cfg);

        let mut theta = 0.0f64;
        let mut m = 0.0f64;
        let mut v = 0.0f64;
        for t in 1..=1000u32 {
            state.step(&mut net, &grads);

            m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
            v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
            let m_hat = m / (1.0 - cfg.beta1.powi(t as i32));
            let v_hat = v / (1.0 - cfg.beta2.powi(t as i32));
            let step = cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
            theta -= step;

            // Adam's normalized-step property: per-step magnitude close to lr.
            if t > 50 {
                assert!(step.abs() > 0.9 * cfg.learning_rate);
                assert!(step.abs() < 1.01 * cfg.learning_rate);
            }
        }
        assert!((net.hidden.biases[3] - theta).abs() < 1e-12);
        // Moving against a constant negative gradient means theta grew.
        assert!(net.hidden.biases[3] > 0.9);
    }
}
