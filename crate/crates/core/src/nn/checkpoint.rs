//! Checkpoint container: a plain-text manifest (version, step, seed, config
//! hash, architecture, optimizer hyperparameters, tensor names/shapes/
//! offsets) followed by one little-endian f32 blob holding every tensor,
//! integrity-checked by SHA-256.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::adam::OptimizerState;
use super::encoder::EncoderConfig;
use super::model::{ModelConfig, ModelParams};
use crate::error::{CadenceError, Result};

const MAGIC: &str = "cadence-checkpoint v1";
const BLOB_MARKER: &[u8] = b"\nblob\n";

/// Everything needed to resume training or run inference.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub params: ModelParams<f32>,
    pub opt: OptimizerState<f32>,
    pub step: u64,
    pub seed: u64,
    pub config_hash: String,
}

fn arch_line(config: &ModelConfig) -> String {
    let e = &config.encoder;
    let channels: Vec<String> = e.channels.iter().map(|c| c.to_string()).collect();
    format!(
        "in{}x{} k{} s{} ch{} d{} h{}",
        e.input_len,
        e.in_channels,
        e.kernel,
        e.stride,
        channels.join(","),
        e.embed_dim,
        config.projector_hidden
    )
}

fn parse_arch(line: &str, path: &Path) -> Result<ModelConfig> {
    let mismatch = |message: String| CadenceError::VersionMismatch {
        path: path.display().to_string(),
        message,
    };
    let mut input_len = None;
    let mut in_channels = None;
    let mut kernel = None;
    let mut stride = None;
    let mut channels = None;
    let mut embed = None;
    let mut hidden = None;
    for token in line.split_ascii_whitespace() {
        if let Some(rest) = token.strip_prefix("in") {
            let (l, c) = rest
                .split_once('x')
                .ok_or_else(|| mismatch(format!("bad arch token {token}")))?;
            input_len = l.parse().ok();
            in_channels = c.parse().ok();
        } else if let Some(rest) = token.strip_prefix("ch") {
            let parsed: Option<Vec<usize>> = rest.split(',').map(|v| v.parse().ok()).collect();
            channels = parsed;
        } else if let Some(rest) = token.strip_prefix('k') {
            kernel = rest.parse().ok();
        } else if let Some(rest) = token.strip_prefix('s') {
            stride = rest.parse().ok();
        } else if let Some(rest) = token.strip_prefix('d') {
            embed = rest.parse().ok();
        } else if let Some(rest) = token.strip_prefix('h') {
            hidden = rest.parse().ok();
        }
    }
    let encoder = EncoderConfig {
        input_len: input_len.ok_or_else(|| mismatch("arch missing input length".into()))?,
        in_channels: in_channels.ok_or_else(|| mismatch("arch missing channel count".into()))?,
        kernel: kernel.ok_or_else(|| mismatch("arch missing kernel".into()))?,
        stride: stride.ok_or_else(|| mismatch("arch missing stride".into()))?,
        channels: channels.ok_or_else(|| mismatch("arch missing channels".into()))?,
        embed_dim: embed.ok_or_else(|| mismatch("arch missing embed dim".into()))?,
    };
    Ok(ModelConfig {
        encoder,
        projector_hidden: hidden.ok_or_else(|| mismatch("arch missing hidden width".into()))?,
    })
}

/// Write a checkpoint atomically (temp file + rename).
pub fn save_checkpoint(
    path: &Path,
    params: &ModelParams<f32>,
    opt: &OptimizerState<f32>,
    step: u64,
    seed: u64,
    config_hash: &str,
) -> Result<()> {
    let param_count = params.param_count();
    if opt.m.len() != param_count || opt.v.len() != param_count {
        return Err(CadenceError::ShapeMismatch(format!(
            "optimizer moments ({}, {}) do not match {} parameters",
            opt.m.len(),
            opt.v.len(),
            param_count
        )));
    }

    let mut blob: Vec<u8> = Vec::with_capacity((param_count * 3 + 2) * 4);
    let mut tensor_lines = String::new();
    let mut offset = 0usize;
    let mut push_tensor = |name: &str, shape: &[usize], data: &[f32],
                           blob: &mut Vec<u8>,
                           lines: &mut String| {
        let dims: Vec<String> = shape.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(lines, "tensor={} {} {}", name, dims.join("x"), offset);
        for v in data {
            blob.extend_from_slice(&v.to_le_bytes());
        }
        offset += data.len() * 4;
    };

    let manifest = params.manifest();
    let flat = params.flatten();
    let flat_slice = flat.as_slice().expect("contiguous");
    let mut cursor = 0usize;
    for (name, shape) in &manifest {
        let len: usize = shape.iter().product();
        push_tensor(name, shape, &flat_slice[cursor..cursor + len], &mut blob, &mut tensor_lines);
        cursor += len;
    }
    push_tensor(
        "opt.m",
        &[param_count],
        opt.m.as_slice().expect("contiguous"),
        &mut blob,
        &mut tensor_lines,
    );
    push_tensor(
        "opt.v",
        &[param_count],
        opt.v.as_slice().expect("contiguous"),
        &mut blob,
        &mut tensor_lines,
    );

    let digest = Sha256::digest(&blob);
    let mut header = String::new();
    let _ = writeln!(header, "{MAGIC}");
    let _ = writeln!(header, "step={step}");
    let _ = writeln!(header, "seed={seed}");
    let _ = writeln!(header, "config_hash={config_hash}");
    let _ = writeln!(header, "arch={}", arch_line(&params.config()));
    let _ = writeln!(
        header,
        "adam={} {} {} {} {}",
        opt.lr, opt.beta1, opt.beta2, opt.epsilon, opt.step
    );
    header.push_str(&tensor_lines);
    let _ = writeln!(header, "blob_bytes={}", blob.len());
    let mut hash_hex = String::with_capacity(64);
    for byte in digest {
        let _ = write!(hash_hex, "{byte:02x}");
    }
    let _ = writeln!(header, "sha256={hash_hex}");
    header.push_str("blob\n");

    let mut bytes = header.into_bytes();
    bytes.extend_from_slice(&blob);

    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, &bytes).map_err(|e| CadenceError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CadenceError::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let bytes = std::fs::read(path).map_err(|e| CadenceError::io(path, e))?;
    let mismatch = |message: String| CadenceError::VersionMismatch {
        path: path.display().to_string(),
        message,
    };

    let marker_pos = bytes
        .windows(BLOB_MARKER.len())
        .position(|w| w == BLOB_MARKER)
        .ok_or_else(|| mismatch("missing blob marker".into()))?;
    let header = std::str::from_utf8(&bytes[..marker_pos])
        .map_err(|_| mismatch("header is not UTF-8".into()))?;
    let blob = &bytes[marker_pos + BLOB_MARKER.len()..];

    let mut lines = header.lines();
    if lines.next() != Some(MAGIC) {
        return Err(mismatch(format!("expected magic {MAGIC:?}")));
    }
    let mut step = None;
    let mut seed = None;
    let mut config_hash = None;
    let mut config = None;
    let mut adam = None;
    let mut tensors: Vec<(String, Vec<usize>, usize)> = Vec::new();
    let mut blob_bytes = None;
    let mut sha_expected = None;
    for line in lines {
        let (key, value) = match line.split_once('=') {
            Some(kv) => kv,
            None => continue,
        };
        match key {
            "step" => step = value.parse().ok(),
            "seed" => seed = value.parse().ok(),
            "config_hash" => config_hash = Some(value.to_string()),
            "arch" => config = Some(parse_arch(value, path)?),
            "adam" => {
                let parts: Vec<&str> = value.split_ascii_whitespace().collect();
                if parts.len() == 5 {
                    let nums: Option<(f32, f32, f32, f32)> = (|| {
                        Some((
                            parts[0].parse().ok()?,
                            parts[1].parse().ok()?,
                            parts[2].parse().ok()?,
                            parts[3].parse().ok()?,
                        ))
                    })();
                    let opt_step: Option<u64> = parts[4].parse().ok();
                    adam = nums.zip(opt_step);
                }
            }
            "tensor" => {
                let parts: Vec<&str> = value.split_ascii_whitespace().collect();
                if parts.len() != 3 {
                    return Err(mismatch(format!("bad tensor line {line:?}")));
                }
                let shape: Option<Vec<usize>> =
                    parts[1].split('x').map(|d| d.parse().ok()).collect();
                let offset: Option<usize> = parts[2].parse().ok();
                match (shape, offset) {
                    (Some(shape), Some(offset)) => {
                        tensors.push((parts[0].to_string(), shape, offset))
                    }
                    _ => return Err(mismatch(format!("bad tensor line {line:?}"))),
                }
            }
            "blob_bytes" => blob_bytes = value.parse().ok(),
            "sha256" => sha_expected = Some(value.to_string()),
            _ => {}
        }
    }

    let blob_bytes: usize = blob_bytes.ok_or_else(|| mismatch("missing blob_bytes".into()))?;
    let sha_expected = sha_expected.ok_or_else(|| mismatch("missing sha256".into()))?;
    if blob.len() != blob_bytes {
        return Err(CadenceError::ChecksumMismatch { path: path.display().to_string() });
    }
    let digest = Sha256::digest(blob);
    let mut hash_hex = String::with_capacity(64);
    for byte in digest {
        let _ = write!(hash_hex, "{byte:02x}");
    }
    if hash_hex != sha_expected {
        return Err(CadenceError::ChecksumMismatch { path: path.display().to_string() });
    }

    let config = config.ok_or_else(|| mismatch("missing arch line".into()))?;
    let mut params = ModelParams::<f32>::zeros(&config)
        .map_err(|e| mismatch(format!("arch not constructible: {e}")))?;
    let param_count = params.param_count();

    let expected = params.manifest();
    if tensors.len() != expected.len() + 2 {
        return Err(mismatch(format!(
            "{} tensors in file, architecture implies {}",
            tensors.len(),
            expected.len() + 2
        )));
    }
    let read_tensor = |shape: &[usize], offset: usize| -> Result<Vec<f32>> {
        let len: usize = shape.iter().product();
        let end = offset + len * 4;
        if end > blob.len() {
            return Err(CadenceError::ChecksumMismatch { path: path.display().to_string() });
        }
        Ok(blob[offset..end]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect())
    };

    let mut flat: Vec<f32> = Vec::with_capacity(param_count);
    for ((name, shape, offset), (want_name, want_shape)) in tensors.iter().zip(&expected) {
        if name != want_name || shape != want_shape {
            return Err(mismatch(format!(
                "tensor {name} {shape:?} does not match architecture's {want_name} {want_shape:?}"
            )));
        }
        flat.extend(read_tensor(shape, *offset)?);
    }
    params.assign_from_flat(&ndarray::Array1::from_vec(flat))?;

    let ((lr, beta1, beta2, epsilon), opt_step) =
        adam.ok_or_else(|| mismatch("missing adam line".into()))?;
    let mut opt = OptimizerState::<f32>::new(
        param_count,
        lr as f64,
        beta1 as f64,
        beta2 as f64,
        epsilon as f64,
    );
    opt.step = opt_step;
    for (name, slot) in [("opt.m", &mut opt.m), ("opt.v", &mut opt.v)] {
        let (got_name, shape, offset) = &tensors[expected.len() + usize::from(name == "opt.v")];
        if got_name != name || shape != &vec![param_count] {
            return Err(mismatch(format!("optimizer tensor {got_name} unexpected")));
        }
        *slot = ndarray::Array1::from_vec(read_tensor(shape, *offset)?);
    }

    Ok(Checkpoint {
        params,
        opt,
        step: step.ok_or_else(|| mismatch("missing step".into()))?,
        seed: seed.ok_or_else(|| mismatch("missing seed".into()))?,
        config_hash: config_hash.ok_or_else(|| mismatch("missing config_hash".into()))?,
    })
}
