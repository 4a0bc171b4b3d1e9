//! Channels-by-length activation grid passed between layers.

use crate::error::{Error, Result};

/// A 2-D grid of activations: `channels` rows of `length` values, stored
/// channel-major (`values[c * length + i]`).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    channels: usize,
    length: usize,
    values: Vec<f64>,
}

impl FeatureMap {
    pub fn new(channels: usize, length: usize, values: Vec<f64>) -> Result<Self> {
        if channels == 0 || length == 0 {
            return Err(Error::Config(format!(
                "feature map dimensions must be positive, got {channels}x{length}"
            )));
        }
        if values.len() != channels * length {
            return Err(Error::Config(format!(
                "feature map {channels}x{length} needs {} values, got {}",
                channels * length,
                values.len()
            )));
        }
        Ok(Self {
            channels,
            length,
            values,
        })
    }

    pub fn zeros(channels: usize, length: usize) -> Self {
        Self {
            channels,
            length,
            values: vec![0.0; channels * length],
        }
    }

    /// Single-channel map, the shape of one preprocessed sensor row.
    pub fn from_single_channel(values: Vec<f64>) -> Result<Self> {
        let length = values.len();
        Self::new(1, length, values)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, channel: usize, index: usize) -> f64 {
        debug_assert!(channel < self.channels && index < self.length);
        self.values[channel * self.length + index]
    }

    pub fn set(&mut self, channel: usize, index: usize, value: f64) {
        debug_assert!(channel < self.channels && index < self.length);
        self.values[channel * self.length + index] = value;
    }

    /// One channel as a contiguous slice.
    pub fn channel(&self, channel: usize) -> &[f64] {
        let start = channel * self.length;
        &self.values[start..start + self.length]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Channel-major flattening: output index = `channel * length + position`.
    pub fn flatten(&self) -> Vec<f64> {
        self.values.clone()
    }

    /// Inverse of [`flatten`](Self::flatten) for a declared shape.
    pub fn unflatten(channels: usize, length: usize, flat: Vec<f64>) -> Result<Self> {
        Self::new(channels, length, flat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_is_channel_major() {
        let map = FeatureMap::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(map.channel(0), &[1.0, 2.0]);
        assert_eq!(map.channel(1), &[3.0, 4.0]);
        assert_eq!(map.flatten(), vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn flatten_then_unflatten_is_identity() {
        let map = FeatureMap::new(3, 4, (0..12).map(f64::from).collect()).unwrap();
        let back = FeatureMap::unflatten(3, 4, map.flatten()).unwrap();
        assert_eq!(map, back);
    }

    #[test]
    fn size_mismatch_is_rejected() {
        assert!(FeatureMap::new(2, 3, vec![0.0; 5]).is_err());
        assert!(FeatureMap::new(0, 3, vec![]).is_err());
    }
}
