//! Coincidence-contrastive accelerometer embeddings.
//!
//! The crate turns raw wrist-accelerometer archives into a shared canonical
//! format, trains a 1-D convolutional encoder with a coincidence-contrastive
//! objective, and evaluates the learned embeddings through linear probes and
//! similarity-driven salient-activity segmentation.

pub mod augment;
pub mod config;
pub mod error;
pub mod evaluation;
pub mod ingest;
pub mod io;
pub mod nn;
pub mod pairing;
pub mod probe;
pub mod segmentation;
pub mod signal;
pub mod synth;
pub mod training;

pub use error::{CadenceError, Result};
pub use signal::{
    BaselineFeatures, LabeledInterval, Recording, Window, TARGET_RATE_HZ, WINDOW_MS,
    WINDOW_SAMPLES,
};
