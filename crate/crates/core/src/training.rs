//! Self-supervised training loop: stream pair batches, step Adam, trace the
//! loss, and emit checkpoints.
//!
//! Every batch is seeded by the absolute step index, never by an RNG carried
//! across steps, so a run resumed from a checkpoint at step k draws exactly
//! the batches an uninterrupted run would have drawn from step k onward.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::augment::{AugmentationRanges, RotationMode};
use crate::error::{CadenceError, Result};
use crate::nn::adam::{adam_step, OptimizerState};
use crate::nn::checkpoint::Checkpoint;
use crate::nn::model::{backprop_gradients, ModelConfig, ModelParams};
use crate::pairing::{sample_pair_batch_with, PairingConfig, WindowIndex};

/// Adam hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { lr: 1e-3, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.lr.is_finite() || self.lr < 0.0 {
            return Err(CadenceError::InvalidConfig(format!("optimizer.lr {}", self.lr)));
        }
        for (name, beta) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&beta) {
                return Err(CadenceError::InvalidConfig(format!(
                    "optimizer.{name} {beta} outside [0, 1)"
                )));
            }
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(CadenceError::InvalidConfig(format!(
                "optimizer.epsilon {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Full training-run configuration. The batch size lives on the embedded
/// [`PairingConfig`]; [`TrainConfig::batch_b`] reads it through.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub steps: u64,
    pub seed: u64,
    /// Emit a checkpoint every this many steps (and always at the last step).
    pub checkpoint_interval: u64,
    pub model: ModelConfig,
    pub pairing: PairingConfig,
    pub augmentation: AugmentationRanges,
    pub optimizer: OptimizerConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            steps: 2_000,
            seed: 0,
            checkpoint_interval: 500,
            model: ModelConfig::default(),
            pairing: PairingConfig::default(),
            augmentation: AugmentationRanges::default(),
            optimizer: OptimizerConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn batch_b(&self) -> usize {
        self.pairing.batch_b
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(CadenceError::InvalidConfig("steps must be ≥ 1".into()));
        }
        if self.checkpoint_interval == 0 || self.checkpoint_interval > self.steps {
            return Err(CadenceError::InvalidConfig(format!(
                "checkpoint_interval {} outside 1..={} steps",
                self.checkpoint_interval, self.steps
            )));
        }
        self.pairing.validate()?;
        self.optimizer.validate()
    }

    /// Key-value rendering of every field, one `key=value` line per field in
    /// fixed order. This is the hashed identity of a run and the on-disk
    /// config format.
    pub fn canonical_string(&self) -> String {
        let mut s = String::new();
        let e = &self.model.encoder;
        let channels: Vec<String> = e.channels.iter().map(|c| c.to_string()).collect();
        let widths: Vec<String> =
            self.augmentation.median_widths.iter().map(|w| w.to_string()).collect();
        let rotation = match self.augmentation.rotation_mode {
            RotationMode::Planar => "planar",
            RotationMode::ThreeAxis => "three_axis",
        };
        let _ = writeln!(s, "steps={}", self.steps);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "checkpoint_interval={}", self.checkpoint_interval);
        let _ = writeln!(s, "model.input_len={}", e.input_len);
        let _ = writeln!(s, "model.in_channels={}", e.in_channels);
        let _ = writeln!(s, "model.kernel={}", e.kernel);
        let _ = writeln!(s, "model.stride={}", e.stride);
        let _ = writeln!(s, "model.channels={}", channels.join(","));
        let _ = writeln!(s, "model.embed_dim={}", e.embed_dim);
        let _ = writeln!(s, "model.projector_hidden={}", self.model.projector_hidden);
        let _ = writeln!(s, "pairing.delta_t_s={}", self.pairing.delta_t_s);
        let _ = writeln!(s, "pairing.mode_mix={}", self.pairing.mode_mix);
        let _ = writeln!(s, "pairing.batch_b={}", self.pairing.batch_b);
        let a = &self.augmentation;
        let _ = writeln!(s, "augment.median_widths={}", widths.join(","));
        let _ = writeln!(s, "augment.translate_min={}", a.translate_min);
        let _ = writeln!(s, "augment.translate_max={}", a.translate_max);
        let _ = writeln!(s, "augment.jump_min_g={}", a.jump_min_g);
        let _ = writeln!(s, "augment.jump_max_g={}", a.jump_max_g);
        let _ = writeln!(s, "augment.wander_min_g={}", a.wander_min_g);
        let _ = writeln!(s, "augment.wander_max_g={}", a.wander_max_g);
        let _ = writeln!(s, "augment.wander_min_period_s={}", a.wander_min_period_s);
        let _ = writeln!(s, "augment.wander_max_period_s={}", a.wander_max_period_s);
        let _ = writeln!(s, "augment.noise_min_g={}", a.noise_min_g);
        let _ = writeln!(s, "augment.noise_max_g={}", a.noise_max_g);
        let _ = writeln!(s, "augment.rotation_mode={rotation}");
        let _ = writeln!(s, "optimizer.lr={}", self.optimizer.lr);
        let _ = writeln!(s, "optimizer.beta1={}", self.optimizer.beta1);
        let _ = writeln!(s, "optimizer.beta2={}", self.optimizer.beta2);
        let _ = writeln!(s, "optimizer.epsilon={}", self.optimizer.epsilon);
        s
    }

    /// SHA-256 over the canonical rendering, excluding `steps` and
    /// `checkpoint_interval` so a run may be resumed toward a longer horizon.
    pub fn config_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for line in self.canonical_string().lines() {
            if line.starts_with("steps=") || line.starts_with("checkpoint_interval=") {
                continue;
            }
            hasher.update(line.as_bytes());
            hasher.update(b"\n");
        }
        let mut hex = String::with_capacity(64);
        for byte in hasher.finalize() {
            let _ = write!(hex, "{byte:02x}");
        }
        hex
    }
}

/// Final checkpoint plus the per-step loss values of this run (resumed runs
/// trace only their own steps).
#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub checkpoint: Checkpoint,
    pub loss_trace: Vec<f32>,
}

/// Sampling seed for one step: splitmix64 finalizer over the run seed and the
/// absolute step index.
fn step_seed(seed: u64, step: u64) -> u64 {
    let mut z = seed ^ step.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Train from a fresh initialization.
pub fn train(config: &TrainConfig, index: &WindowIndex) -> Result<TrainOutput> {
    train_with(config, index, None, |_| Ok(()))
}

/// Train, optionally resuming from a checkpoint, calling `on_checkpoint` at
/// every interval boundary and at the final step.
pub fn train_with(
    config: &TrainConfig,
    index: &WindowIndex,
    resume: Option<Checkpoint>,
    mut on_checkpoint: impl FnMut(&Checkpoint) -> Result<()>,
) -> Result<TrainOutput> {
    config.validate()?;
    if index.is_empty() {
        return Err(CadenceError::EmptyDataset);
    }
    let config_hash = config.config_hash();

    let (mut params, mut opt, start) = match resume {
        Some(ck) => {
            if ck.config_hash != config_hash {
                return Err(CadenceError::InvalidConfig(format!(
                    "resume checkpoint hash {} does not match config hash {}",
                    ck.config_hash, config_hash
                )));
            }
            if ck.params.config() != config.model {
                return Err(CadenceError::InvalidConfig(
                    "resume checkpoint architecture does not match config".into(),
                ));
            }
            if ck.step > config.steps {
                return Err(CadenceError::InvalidConfig(format!(
                    "resume checkpoint is at step {}, past the {}-step horizon",
                    ck.step, config.steps
                )));
            }
            (ck.params, ck.opt, ck.step)
        }
        None => {
            let params = ModelParams::<f32>::init(&config.model, config.seed)?;
            let opt = OptimizerState::<f32>::new(
                params.param_count(),
                config.optimizer.lr,
                config.optimizer.beta1,
                config.optimizer.beta2,
                config.optimizer.epsilon,
            );
            (params, opt, 0)
        }
    };

    let mut trace = Vec::with_capacity((config.steps - start) as usize);
    let mut latest = None;
    for step in start..config.steps {
        let batch = sample_pair_batch_with(
            index,
            &config.pairing,
            &config.augmentation,
            step_seed(config.seed, step),
        )?;
        let (loss, grads) = match backprop_gradients(&params, &batch) {
            Ok(pair) => pair,
            // Parameters that have blown up trip the non-finite guards
            // before the loss itself can read as NaN.
            Err(CadenceError::NonFiniteActivation(_) | CadenceError::NonFiniteGradient(_)) => {
                return Err(CadenceError::DivergedLoss(step + 1));
            }
            Err(e) => return Err(e),
        };
        if !loss.is_finite() {
            return Err(CadenceError::DivergedLoss(step + 1));
        }
        trace.push(loss);

        let mut flat = params.flatten();
        adam_step(&mut flat, &grads.flatten(), &mut opt)?;
        params.assign_from_flat(&flat)?;

        let done = step + 1;
        if done % config.checkpoint_interval == 0 || done == config.steps {
            let ck = Checkpoint {
                params: params.clone(),
                opt: opt.clone(),
                step: done,
                seed: config.seed,
                config_hash: config_hash.clone(),
            };
            on_checkpoint(&ck)?;
            latest = Some(ck);
        }
    }

    let checkpoint = match latest {
        Some(ck) => ck,
        // A resume that is already at the horizon runs zero steps.
        None => Checkpoint { params, opt, step: start, seed: config.seed, config_hash },
    };
    Ok(TrainOutput { checkpoint, loss_trace: trace })
}
