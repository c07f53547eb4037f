//! Encoder, projector, contrastive loss, and the training-side plumbing
//! (optimizer, gradients, checkpoints) that ties them together.

pub mod adam;
pub mod checkpoint;
pub mod conv;
pub mod encoder;
pub mod loss;
pub mod model;
pub mod projector;

pub use adam::{adam_step, OptimizerState};
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use encoder::{encoder_forward, windows_to_batch, EncoderConfig, EncoderParams};
pub use loss::{contrastive_loss, contrastive_loss_grad};
pub use model::{backprop_gradients, gradient_check, pair_loss_direct, ModelConfig, ModelParams};
pub use projector::{build_pair_features, projector_forward, ProjectorParams};
