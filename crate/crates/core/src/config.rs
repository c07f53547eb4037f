//! Flat `key=value` configuration files with dotted keys, the on-disk form
//! of [`TrainConfig`] and [`ProbeConfig`].
//!
//! Every key has a default (the corresponding `Default` impl), so a config
//! file only lists overrides. Blank lines and `#` comments are skipped;
//! unknown keys are errors; a repeated key keeps its last value. The
//! training keys and their order are exactly
//! [`TrainConfig::canonical_string`], so parse and render round-trip.

use std::fmt::Write as _;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::augment::RotationMode;
use crate::error::{CadenceError, Result};
use crate::probe::{FeatureSource, ProbeConfig};
use crate::training::TrainConfig;

/// Lowercase hex SHA-256 of `data`; the config-identity hash used by run
/// manifests for inputs that are not a [`TrainConfig`].
pub fn sha256_hex(data: &[u8]) -> String {
    let mut hex = String::with_capacity(64);
    for byte in Sha256::digest(data) {
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}

fn entries(text: &str) -> Result<Vec<(&str, &str)>> {
    let mut out = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CadenceError::InvalidConfig(format!("expected key=value, got {line:?}"))
        })?;
        out.push((key.trim(), value.trim()));
    }
    Ok(out)
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| CadenceError::InvalidConfig(format!("{key}: bad value {value:?}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|item| parse_value(key, item.trim())).collect()
}

/// Parse training-config overrides on top of [`TrainConfig::default`].
pub fn parse_train_config(text: &str) -> Result<TrainConfig> {
    let mut c = TrainConfig::default();
    for (key, value) in entries(text)? {
        match key {
            "steps" => c.steps = parse_value(key, value)?,
            "seed" => c.seed = parse_value(key, value)?,
            "checkpoint_interval" => c.checkpoint_interval = parse_value(key, value)?,
            "model.input_len" => c.model.encoder.input_len = parse_value(key, value)?,
            "model.in_channels" => c.model.encoder.in_channels = parse_value(key, value)?,
            "model.kernel" => c.model.encoder.kernel = parse_value(key, value)?,
            "model.stride" => c.model.encoder.stride = parse_value(key, value)?,
            "model.channels" => c.model.encoder.channels = parse_list(key, value)?,
            "model.embed_dim" => c.model.encoder.embed_dim = parse_value(key, value)?,
            "model.projector_hidden" => c.model.projector_hidden = parse_value(key, value)?,
            "pairing.delta_t_s" => c.pairing.delta_t_s = parse_value(key, value)?,
            "pairing.mode_mix" => c.pairing.mode_mix = parse_value(key, value)?,
            "pairing.batch_b" => c.pairing.batch_b = parse_value(key, value)?,
            "augment.median_widths" => c.augmentation.median_widths = parse_list(key, value)?,
            "augment.translate_min" => c.augmentation.translate_min = parse_value(key, value)?,
            "augment.translate_max" => c.augmentation.translate_max = parse_value(key, value)?,
            "augment.jump_min_g" => c.augmentation.jump_min_g = parse_value(key, value)?,
            "augment.jump_max_g" => c.augmentation.jump_max_g = parse_value(key, value)?,
            "augment.wander_min_g" => c.augmentation.wander_min_g = parse_value(key, value)?,
            "augment.wander_max_g" => c.augmentation.wander_max_g = parse_value(key, value)?,
            "augment.wander_min_period_s" => {
                c.augmentation.wander_min_period_s = parse_value(key, value)?
            }
            "augment.wander_max_period_s" => {
                c.augmentation.wander_max_period_s = parse_value(key, value)?
            }
            "augment.noise_min_g" => c.augmentation.noise_min_g = parse_value(key, value)?,
            "augment.noise_max_g" => c.augmentation.noise_max_g = parse_value(key, value)?,
            "augment.rotation_mode" => {
                c.augmentation.rotation_mode = match value {
                    "planar" => RotationMode::Planar,
                    "three_axis" => RotationMode::ThreeAxis,
                    _ => {
                        return Err(CadenceError::InvalidConfig(format!(
                            "{key}: expected planar or three_axis, got {value:?}"
                        )))
                    }
                }
            }
            "optimizer.lr" => c.optimizer.lr = parse_value(key, value)?,
            "optimizer.beta1" => c.optimizer.beta1 = parse_value(key, value)?,
            "optimizer.beta2" => c.optimizer.beta2 = parse_value(key, value)?,
            "optimizer.epsilon" => c.optimizer.epsilon = parse_value(key, value)?,
            _ => {
                return Err(CadenceError::InvalidConfig(format!(
                    "unknown training config key {key:?}"
                )))
            }
        }
    }
    Ok(c)
}

/// Parse probe-config overrides on top of [`ProbeConfig::default`].
pub fn parse_probe_config(text: &str) -> Result<ProbeConfig> {
    let mut c = ProbeConfig::default();
    for (key, value) in entries(text)? {
        match key {
            "probe.n_values" => c.n_values = parse_list(key, value)?,
            "probe.repeats" => c.repeats = parse_value(key, value)?,
            "probe.train_fraction" => c.train_fraction = parse_value(key, value)?,
            "probe.seed" => c.seed = parse_value(key, value)?,
            "probe.source" => {
                c.source = match value {
                    "embedding" => FeatureSource::Embedding,
                    "baseline" => FeatureSource::Baseline,
                    _ => {
                        return Err(CadenceError::InvalidConfig(format!(
                            "{key}: expected embedding or baseline, got {value:?}"
                        )))
                    }
                }
            }
            _ => {
                return Err(CadenceError::InvalidConfig(format!(
                    "unknown probe config key {key:?}"
                )))
            }
        }
    }
    Ok(c)
}

/// Key-value rendering of a probe config, one `key=value` line per field in
/// fixed order; the probe counterpart of [`TrainConfig::canonical_string`].
pub fn probe_canonical_string(c: &ProbeConfig) -> String {
    let n_values: Vec<String> = c.n_values.iter().map(|n| n.to_string()).collect();
    let mut s = String::new();
    let _ = writeln!(s, "probe.n_values={}", n_values.join(","));
    let _ = writeln!(s, "probe.repeats={}", c.repeats);
    let _ = writeln!(s, "probe.train_fraction={}", c.train_fraction);
    let _ = writeln!(s, "probe.source={}", c.source.name());
    let _ = writeln!(s, "probe.seed={}", c.seed);
    s
}
