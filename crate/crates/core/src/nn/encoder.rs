//! The convolutional encoder: a tower of strided 1-D convolution + ReLU
//! blocks, global average pooling over time, and a dense layer producing the
//! embedding. No normalization layers, so inference is batch-independent.

use ndarray::{Array1, Array2, Array3, Axis, NdFloat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::conv::{conv_backward, conv_forward, same_out_len};
use crate::error::{CadenceError, Result};
use crate::signal::Window;

/// Architecture description. The default matches the trained model: five
/// width-5 stride-2 blocks widening 16→32→64→128→256 over 300×3 inputs,
/// embedding dimension 256.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncoderConfig {
    pub input_len: usize,
    pub in_channels: usize,
    pub kernel: usize,
    pub stride: usize,
    pub channels: Vec<usize>,
    pub embed_dim: usize,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            input_len: 300,
            in_channels: 3,
            kernel: 5,
            stride: 2,
            channels: vec![16, 32, 64, 128, 256],
            embed_dim: 256,
        }
    }
}

impl EncoderConfig {
    /// Temporal length entering each block, plus the final pooled length.
    pub fn length_chain(&self) -> Vec<usize> {
        let mut chain = vec![self.input_len];
        for _ in &self.channels {
            chain.push(same_out_len(*chain.last().unwrap(), self.stride));
        }
        chain
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels.is_empty()
            || self.input_len == 0
            || self.in_channels == 0
            || self.embed_dim == 0
            || self.stride == 0
            || self.kernel == 0
        {
            return Err(CadenceError::InvalidConfig(
                "encoder dimensions must all be positive".into(),
            ));
        }
        if *self.length_chain().last().unwrap() == 0 {
            return Err(CadenceError::InvalidConfig(
                "encoder tower collapses the temporal axis to zero".into(),
            ));
        }
        Ok(())
    }
}

/// One convolution block's parameters; weight rows are (channel, tap) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvBlock<F> {
    pub weight: Array2<F>,
    pub bias: Array1<F>,
}

/// Encoder parameters (also used for encoder gradients, which mirror them).
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderParams<F> {
    pub config: EncoderConfig,
    pub blocks: Vec<ConvBlock<F>>,
    pub dense_w: Array2<F>,
    pub dense_b: Array1<F>,
}

impl<F: NdFloat> EncoderParams<F> {
    /// He-uniform weights, zero biases.
    pub fn init(config: EncoderConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut blocks = Vec::with_capacity(config.channels.len());
        let mut c_in = config.in_channels;
        for &c_out in &config.channels {
            let fan_in = c_in * config.kernel;
            blocks.push(ConvBlock {
                weight: he_uniform(&mut rng, fan_in, c_out),
                bias: Array1::zeros(c_out),
            });
            c_in = c_out;
        }
        Ok(Self {
            dense_w: he_uniform(&mut rng, c_in, config.embed_dim),
            dense_b: Array1::zeros(config.embed_dim),
            blocks,
            config,
        })
    }

    pub fn zeros(config: EncoderConfig) -> Result<Self> {
        config.validate()?;
        let mut blocks = Vec::with_capacity(config.channels.len());
        let mut c_in = config.in_channels;
        for &c_out in &config.channels {
            blocks.push(ConvBlock {
                weight: Array2::zeros((c_in * config.kernel, c_out)),
                bias: Array1::zeros(c_out),
            });
            c_in = c_out;
        }
        Ok(Self {
            dense_w: Array2::zeros((c_in, config.embed_dim)),
            dense_b: Array1::zeros(config.embed_dim),
            blocks,
            config,
        })
    }

    pub fn param_count(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| b.weight.len() + b.bias.len())
            .sum::<usize>()
            + self.dense_w.len()
            + self.dense_b.len()
    }
}

fn he_uniform<F: NdFloat>(rng: &mut ChaCha8Rng, fan_in: usize, cols: usize) -> Array2<F> {
    let bound = (6.0 / fan_in as f64).sqrt();
    Array2::from_shape_fn((fan_in, cols), |_| {
        F::from(rng.gen_range(-bound..bound)).unwrap()
    })
}

/// Convert windows to a batch tensor (N, 300, 3) in the requested precision.
pub fn windows_to_batch<F: NdFloat>(windows: &[Window]) -> Array3<F> {
    let n = windows.len();
    let len = windows.first().map_or(0, |w| w.data.len());
    Array3::from_shape_fn((n, len, 3), |(b, t, c)| {
        F::from(windows[b].data[t][c]).unwrap()
    })
}

/// Intermediate activations kept for the backward pass.
pub struct EncoderCache<F> {
    cols: Vec<Array2<F>>,
    pre_relu: Vec<Array3<F>>,
    input_dims: Vec<(usize, usize, usize)>,
    pooled: Array2<F>,
}

/// Embed a batch of windows. Output row i depends only on input row i.
pub fn encoder_forward<F: NdFloat>(
    params: &EncoderParams<F>,
    input: &Array3<F>,
) -> Result<Array2<F>> {
    encoder_forward_cached(params, input).map(|(emb, _)| emb)
}

/// As [`encoder_forward`], returning the cache for [`encoder_backward`].
pub fn encoder_forward_cached<F: NdFloat>(
    params: &EncoderParams<F>,
    input: &Array3<F>,
) -> Result<(Array2<F>, EncoderCache<F>)> {
    let cfg = &params.config;
    let (n, len, ch) = input.dim();
    if len != cfg.input_len || ch != cfg.in_channels {
        return Err(CadenceError::ShapeMismatch(format!(
            "encoder input {:?}, expected (N, {}, {})",
            input.dim(),
            cfg.input_len,
            cfg.in_channels
        )));
    }

    let mut cols = Vec::with_capacity(params.blocks.len());
    let mut pre_relu = Vec::with_capacity(params.blocks.len());
    let mut input_dims = Vec::with_capacity(params.blocks.len());
    let mut cur = input.to_owned();
    for block in &params.blocks {
        input_dims.push(cur.dim());
        let (pre, c) = conv_forward(&cur, &block.weight, &block.bias, cfg.kernel, cfg.stride)?;
        cur = pre.mapv(|v| v.max(F::zero()));
        cols.push(c);
        pre_relu.push(pre);
    }

    let last_len = cur.dim().1;
    let pooled = cur.sum_axis(Axis(1)) / F::from(last_len).unwrap();
    let emb = pooled.dot(&params.dense_w) + &params.dense_b;
    if emb.iter().any(|v| !v.is_finite()) {
        return Err(CadenceError::NonFiniteActivation("embedding".into()));
    }
    debug_assert_eq!(emb.dim(), (n, cfg.embed_dim));
    Ok((emb, EncoderCache { cols, pre_relu, input_dims, pooled }))
}

/// Parameter gradients given the gradient of the embeddings.
pub fn encoder_backward<F: NdFloat>(
    params: &EncoderParams<F>,
    cache: &EncoderCache<F>,
    d_emb: &Array2<F>,
) -> Result<EncoderParams<F>> {
    let cfg = &params.config;
    let d_dense_w = cache.pooled.t().dot(d_emb);
    let d_dense_b = d_emb.sum_axis(Axis(0));

    let d_pooled = d_emb.dot(&params.dense_w.t());
    let last = cache.pre_relu.last().expect("at least one block");
    let (n, last_len, c_last) = last.dim();
    let scale = F::from(last_len).unwrap().recip();
    let mut d_cur = Array3::from_shape_fn((n, last_len, c_last), |(b, _, c)| {
        d_pooled[[b, c]] * scale
    });

    let mut d_blocks: Vec<ConvBlock<F>> = Vec::with_capacity(params.blocks.len());
    for i in (0..params.blocks.len()).rev() {
        let mut d_pre = d_cur;
        d_pre.zip_mut_with(&cache.pre_relu[i], |g, &pre| {
            if pre <= F::zero() {
                *g = F::zero();
            }
        });
        let (d_input, d_weight, d_bias) = conv_backward(
            &d_pre,
            &cache.cols[i],
            &params.blocks[i].weight,
            cache.input_dims[i],
            cfg.kernel,
            cfg.stride,
        );
        d_blocks.push(ConvBlock { weight: d_weight, bias: d_bias });
        d_cur = d_input;
    }
    d_blocks.reverse();

    let grads = EncoderParams {
        config: cfg.clone(),
        blocks: d_blocks,
        dense_w: d_dense_w,
        dense_b: d_dense_b,
    };
    Ok(grads)
}
