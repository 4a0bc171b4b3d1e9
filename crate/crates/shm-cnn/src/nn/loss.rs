//! Binary cross-entropy loss.

/// Probabilities are clipped into `[PROB_CLIP, 1 - PROB_CLIP]` before the
/// logarithms; the loss is undefined at exactly 0 or 1.
pub const PROB_CLIP: f64 = 1e-7;

pub fn clip_probability(p: f64) -> f64 {
    p.clamp(PROB_CLIP, 1.0 - PROB_CLIP)
}

/// `-(y*ln(p) + (1-y)*ln(1-p))` with `p` clipped. `label` must be 0 or 1.
pub fn bce_loss(label: u8, p: f64) -> f64 {
    debug_assert!(label <= 1, "binary label expected, got {label}");
    let p = clip_probability(p);
    let y = f64::from(label);
    -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
}

/// Decision rule shared by training metrics, evaluation, and prediction:
/// probabilities at or above the threshold are called damaged (1).
pub fn classify(p: f64, threshold: f64) -> u8 {
    if p >= threshold {
        1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn loss_at_half_is_ln_two() {
        assert_abs_diff_eq!(bce_loss(1, 0.5), std::f64::consts::LN_2, epsilon = 1e-12);
        assert_abs_diff_eq!(bce_loss(0, 0.5), std::f64::consts::LN_2, epsilon = 1e-12);
    }

    #[test]
    fn loss_of_confident_correct_prediction() {
        // -ln(0.9)
        assert_abs_diff_eq!(bce_loss(1, 0.9), 0.105360515657826, epsilon = 1e-12);
    }

    #[test]
    fn loss_is_finite_at_saturated_probabilities() {
        assert!(bce_loss(1, 0.0).is_finite());
        assert!(bce_loss(0, 1.0).is_finite());
        assert!(bce_loss(1, 1.0) >= 0.0);
    }

    #[test]
    fn loss_is_nonnegative_and_zero_only_at_clamped_perfection() {
        for &(y, p) in &[(0u8, 0.1), (0, 0.99), (1, 0.3), (1, 0.5)] {
            assert!(bce_loss(y, p) > 0.0, "bce({y},{p})");
        }
        // At a fully saturated correct prediction the loss hits the clamp floor.
        assert!(bce_loss(1, 1.0) < 2.0 * PROB_CLIP);
    }

    #[test]
    fn threshold_ties_are_called_damaged() {
        assert_eq!(classify(0.5, 0.5), 1);
        assert_eq!(classify(0.499_999_9, 0.5), 0);
    }
}
