//! From-scratch neural network engine: the fixed conv/pool/dense stack,
//! binary cross-entropy loss, hand-derived backpropagation, and Adam.

mod adam;
mod feature_map;
mod layers;
mod loss;
mod model_io;
mod network;
mod train;

pub use adam::{AdamConfig, AdamState};
pub use feature_map::FeatureMap;
pub use layers::{sigmoid, Activation, Conv1d, Dense, MaxPool1d};
pub use loss::{bce_loss, classify, clip_probability, PROB_CLIP};
pub use model_io::{
    load_model, model_from_str, model_to_string, save_model, ModelHyper, MODEL_MAGIC,
};
pub use network::{
    ForwardTrace, Gradients, Network, CONV_FILTERS, CONV_KERNEL, CONV_OUT_LENGTH, FLAT_DIM,
    HIDDEN_DIM, INPUT_CHANNELS, INPUT_LENGTH, POOL_OUT_LENGTH, POOL_SIZE,
};
pub use train::{evaluate_set, train, EpochMetrics, LabeledSample, TrainConfig};
