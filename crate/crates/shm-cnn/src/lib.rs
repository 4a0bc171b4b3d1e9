//! Vibration-based structural damage detection on a simulated three-story
//! benchmark.
//!
//! The crate has four layers, each usable on its own:
//!
//! - [`simulator`] — a calibrated 4-DOF shear-building surrogate of the
//!   three-story bumper-gap benchmark: band-limited random base excitation,
//!   Runge-Kutta time integration with one-sided contact, the full 17-state
//!   condition catalogue, and deterministic dataset generation.
//! - [`preprocess`] — tabular sensor data handling: mean imputation,
//!   min/max normalization fitted on the training partition only,
//!   trial-atomic stratified splits, and the CSV/sidecar file formats.
//! - [`nn`] — a from-scratch 1-D convolutional network
//!   (Conv1d(32,3,ReLU) -> MaxPool1d(2) -> Flatten -> Dense(16,ReLU) ->
//!   Dense(1,Sigmoid)) with hand-derived backpropagation, binary
//!   cross-entropy loss, and an Adam optimizer.
//! - [`pipeline`] — the end-to-end experiment: split, fit stats, train,
//!   evaluate, and emit plot-ready CSV artifacts (epoch metrics, per-state
//!   mean predictions, conv feature maps).
//!
//! [`cli`] wires everything into the `shm-cnn` binary's five subcommands
//! (`simulate`, `train`, `evaluate`, `predict`, `featuremaps`). Every random
//! decision flows from a single master seed (see [`seed`]), so identical
//! invocations produce byte-identical artifacts.
//!
//! The `examples/` directory has a runnable walkthrough per capability;
//! start with `cargo run --example full_experiment`.

pub mod cli;
pub mod error;
pub mod nn;
pub mod pipeline;
pub mod preprocess;
pub mod seed;
pub mod simulator;

pub use error::{Error, Result};
