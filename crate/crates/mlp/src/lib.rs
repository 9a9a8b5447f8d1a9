//! From-scratch feed-forward ReLU regression: forward/backward passes,
//! Huber loss with L2 weight decay, Adam, a reduce-on-plateau schedule,
//! early stopping, stratified splitting, budgeted random hyperparameter
//! search, and a versioned model file format.
//!
//! A single training run is single-threaded and bit-deterministic for a
//! fixed seed; only hyperparameter trials run in parallel.

pub mod data;
pub mod error;
pub mod hpo;
pub mod model;
pub mod net;
pub mod train;

pub use data::{stratified_split, SplitIndices, TrainingSet};
pub use error::MlpError;
pub use hpo::{hpo_search, sample_config, HpoOutcome, HpoTrial};
pub use model::{
    DroppedFeature, MlpModel, ModelMetadata, Normalization, TargetNormalization,
    MODEL_SCHEMA_VERSION,
};
pub use net::{huber_grad, huber_loss, LayerParams, Net};
pub use train::{r_squared, scheduled_lr, train, Adam, EpochRecord, TrainConfig, TrainHistory};
