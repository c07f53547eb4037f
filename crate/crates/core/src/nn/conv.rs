//! Batched 1-D convolution via im2col with the matching col2im backward.
//!
//! Activations are laid out (batch, time, channel). Padding follows the
//! "same" convention for strided convolution: output length ceil(n / stride),
//! with the shortfall split left-short/right-long.

use ndarray::{Array1, Array2, Array3, NdFloat};

use crate::error::{CadenceError, Result};

/// Output length of a "same"-padded strided convolution.
pub fn same_out_len(n: usize, stride: usize) -> usize {
    n.div_ceil(stride)
}

/// (left, right) zero padding for the "same" convention.
pub fn pad_amounts(n: usize, kernel: usize, stride: usize) -> (usize, usize) {
    let out = same_out_len(n, stride);
    let total = ((out - 1) * stride + kernel).saturating_sub(n);
    (total / 2, total - total / 2)
}

/// Unfold `input` (N, L, C) into patch rows (N·L_out, C·K); column c·K + k
/// holds channel c at kernel tap k. Out-of-range taps read zero.
pub fn im2col<F: NdFloat>(input: &Array3<F>, kernel: usize, stride: usize) -> Array2<F> {
    let (n, len, ch) = input.dim();
    let out_len = same_out_len(len, stride);
    let (pad_left, _) = pad_amounts(len, kernel, stride);
    let mut cols = Array2::<F>::zeros((n * out_len, ch * kernel));
    for b in 0..n {
        for l in 0..out_len {
            let row = b * out_len + l;
            for k in 0..kernel {
                let t = (l * stride + k) as isize - pad_left as isize;
                if t < 0 || t >= len as isize {
                    continue;
                }
                for c in 0..ch {
                    cols[[row, c * kernel + k]] = input[[b, t as usize, c]];
                }
            }
        }
    }
    cols
}

/// Forward convolution. Returns the output (N, L_out, C_out) and the im2col
/// matrix for reuse in the backward pass.
pub fn conv_forward<F: NdFloat>(
    input: &Array3<F>,
    weight: &Array2<F>,
    bias: &Array1<F>,
    kernel: usize,
    stride: usize,
) -> Result<(Array3<F>, Array2<F>)> {
    let (n, len, ch) = input.dim();
    if weight.nrows() != ch * kernel || weight.ncols() != bias.len() {
        return Err(CadenceError::ShapeMismatch(format!(
            "conv weight {:?} does not match {} channels × {} taps → {} outputs",
            weight.dim(),
            ch,
            kernel,
            bias.len()
        )));
    }
    let out_len = same_out_len(len, stride);
    let cols = im2col(input, kernel, stride);
    let mut flat = cols.dot(weight);
    flat += bias;
    let out = flat
        .into_shape_with_order((n, out_len, weight.ncols()))
        .expect("row count is n·out_len by construction");
    Ok((out, cols))
}

/// Backward convolution: gradients for the input, weight, and bias given the
/// gradient of the (pre-activation) output.
pub fn conv_backward<F: NdFloat>(
    d_out: &Array3<F>,
    cols: &Array2<F>,
    weight: &Array2<F>,
    input_dim: (usize, usize, usize),
    kernel: usize,
    stride: usize,
) -> (Array3<F>, Array2<F>, Array1<F>) {
    let (n, len, ch) = input_dim;
    let (_, out_len, c_out) = d_out.dim();
    let d_flat = d_out
        .to_owned()
        .into_shape_with_order((n * out_len, c_out))
        .expect("contiguous reshape");

    let d_weight = cols.t().dot(&d_flat);
    let d_bias = d_flat.sum_axis(ndarray::Axis(0));

    let d_cols = d_flat.dot(&weight.t());
    let (pad_left, _) = pad_amounts(len, kernel, stride);
    let mut d_input = Array3::<F>::zeros(input_dim);
    for b in 0..n {
        for l in 0..out_len {
            let row = b * out_len + l;
            for k in 0..kernel {
                let t = (l * stride + k) as isize - pad_left as isize;
                if t < 0 || t >= len as isize {
                    continue;
                }
                for c in 0..ch {
                    d_input[[b, t as usize, c]] += d_cols[[row, c * kernel + k]];
                }
            }
        }
    }
    (d_input, d_weight, d_bias)
}
