//! Full-model plumbing: the combined parameter container, the training
//! forward/backward pass over a [`PairBatch`], and the finite-difference
//! gradient check.
//!
//! Training gradients flow through a factored pair path that never
//! materializes the (2b)²×2d feature matrix: the first projector layer is
//! split into halves acting on each pair member, and rows are streamed per
//! anchor. The explicit feature path ([`pair_loss_direct`]) computes the same
//! loss and backs the gradient check's numeric side.

use ndarray::{concatenate, Array1, Array2, Axis, NdFloat};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::encoder::{
    encoder_backward, encoder_forward, encoder_forward_cached, windows_to_batch, EncoderConfig,
    EncoderParams,
};
use super::loss::{contrastive_loss, row_ce};
use super::projector::{build_pair_features, projector_forward, ProjectorParams};
use crate::error::{CadenceError, Result};
use crate::pairing::PairBatch;

/// Architecture of the full model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelConfig {
    pub encoder: EncoderConfig,
    pub projector_hidden: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { encoder: EncoderConfig::default(), projector_hidden: 128 }
    }
}

/// Encoder plus projector parameters. The same structure carries gradients,
/// whose tensors mirror the parameter shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<F> {
    pub encoder: EncoderParams<F>,
    pub projector: ProjectorParams<F>,
}

impl<F: NdFloat> ModelParams<F> {
    pub fn init(config: &ModelConfig, seed: u64) -> Result<Self> {
        Ok(Self {
            encoder: EncoderParams::init(config.encoder.clone(), seed)?,
            projector: ProjectorParams::init(
                2 * config.encoder.embed_dim,
                config.projector_hidden,
                seed ^ 0x9e37_79b9_7f4a_7c15,
            )?,
        })
    }

    pub fn zeros(config: &ModelConfig) -> Result<Self> {
        Ok(Self {
            encoder: EncoderParams::zeros(config.encoder.clone())?,
            projector: ProjectorParams::zeros(
                2 * config.encoder.embed_dim,
                config.projector_hidden,
            ),
        })
    }

    pub fn config(&self) -> ModelConfig {
        ModelConfig {
            encoder: self.encoder.config.clone(),
            projector_hidden: self.projector.b1.len(),
        }
    }

    pub fn param_count(&self) -> usize {
        self.encoder.param_count() + self.projector.param_count()
    }

    /// Named tensors in flattening order.
    pub fn manifest(&self) -> Vec<(String, Vec<usize>)> {
        let mut out = Vec::new();
        for (i, block) in self.encoder.blocks.iter().enumerate() {
            out.push((format!("encoder.block{i}.weight"), block.weight.shape().to_vec()));
            out.push((format!("encoder.block{i}.bias"), block.bias.shape().to_vec()));
        }
        out.push(("encoder.dense.weight".into(), self.encoder.dense_w.shape().to_vec()));
        out.push(("encoder.dense.bias".into(), self.encoder.dense_b.shape().to_vec()));
        out.push(("projector.w1".into(), self.projector.w1.shape().to_vec()));
        out.push(("projector.b1".into(), self.projector.b1.shape().to_vec()));
        out.push(("projector.w2".into(), self.projector.w2.shape().to_vec()));
        out.push(("projector.b2".into(), self.projector.b2.shape().to_vec()));
        out
    }

    /// All parameters as one vector, in manifest order, tensors row-major.
    pub fn flatten(&self) -> Array1<F> {
        let mut out = Vec::with_capacity(self.param_count());
        self.for_each_tensor(|t| out.extend_from_slice(t));
        Array1::from_vec(out)
    }

    /// Overwrite all parameters from a flat vector in manifest order.
    pub fn assign_from_flat(&mut self, flat: &Array1<F>) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(CadenceError::ShapeMismatch(format!(
                "flat vector has {} values, model has {} parameters",
                flat.len(),
                self.param_count()
            )));
        }
        let data = flat.as_slice().expect("flat vector is contiguous");
        let mut offset = 0;
        self.for_each_tensor_mut(|t| {
            t.copy_from_slice(&data[offset..offset + t.len()]);
            offset += t.len();
        });
        Ok(())
    }

    fn for_each_tensor(&self, mut f: impl FnMut(&[F])) {
        for block in &self.encoder.blocks {
            f(block.weight.as_slice().expect("standard layout"));
            f(block.bias.as_slice().expect("standard layout"));
        }
        f(self.encoder.dense_w.as_slice().expect("standard layout"));
        f(self.encoder.dense_b.as_slice().expect("standard layout"));
        f(self.projector.w1.as_slice().expect("standard layout"));
        f(self.projector.b1.as_slice().expect("standard layout"));
        f(self.projector.w2.as_slice().expect("standard layout"));
        f(self.projector.b2.as_slice().expect("standard layout"));
    }

    fn for_each_tensor_mut(&mut self, mut f: impl FnMut(&mut [F])) {
        for block in &mut self.encoder.blocks {
            f(block.weight.as_slice_mut().expect("standard layout"));
            f(block.bias.as_slice_mut().expect("standard layout"));
        }
        f(self.encoder.dense_w.as_slice_mut().expect("standard layout"));
        f(self.encoder.dense_b.as_slice_mut().expect("standard layout"));
        f(self.projector.w1.as_slice_mut().expect("standard layout"));
        f(self.projector.b1.as_slice_mut().expect("standard layout"));
        f(self.projector.w2.as_slice_mut().expect("standard layout"));
        f(self.projector.b2.as_slice_mut().expect("standard layout"));
    }
}

fn cast_flat<F: NdFloat>(m: &Array2<f32>) -> Array1<F> {
    Array1::from_iter(m.iter().map(|&v| F::from(v).unwrap()))
}

/// Batch loss through the explicit (2b)²×2d pair-feature matrix. Exists as
/// the independent route for tests and the gradient check; training uses
/// [`backprop_gradients`].
pub fn pair_loss_direct<F: NdFloat>(params: &ModelParams<F>, batch: &PairBatch) -> Result<F> {
    let x = windows_to_batch::<F>(&batch.windows);
    let emb = encoder_forward(&params.encoder, &x)?;
    let feats = build_pair_features(&emb);
    let logits = projector_forward(&params.projector, &feats)?;
    contrastive_loss(&logits, &cast_flat(&batch.labels), &cast_flat(&batch.weights))
}

/// Loss and exact parameter gradients for one batch.
pub fn backprop_gradients<F: NdFloat>(
    params: &ModelParams<F>,
    batch: &PairBatch,
) -> Result<(F, ModelParams<F>)> {
    let x = windows_to_batch::<F>(&batch.windows);
    let (emb, cache) = encoder_forward_cached(&params.encoder, &x)?;
    let (loss, d_emb, proj_grads) =
        pair_path_backward(&params.projector, &emb, &batch.labels, &batch.weights)?;
    let enc_grads = encoder_backward(&params.encoder, &cache, &d_emb)?;
    let grads = ModelParams { encoder: enc_grads, projector: proj_grads };
    let mut finite = true;
    grads.for_each_tensor(|t| finite &= t.iter().all(|v| v.is_finite()));
    if !finite {
        return Err(CadenceError::NonFiniteGradient("batch gradient".into()));
    }
    Ok((loss, grads))
}

/// Streamed loss/backward over all (p, q) pairs of the batch's embeddings.
fn pair_path_backward<F: NdFloat>(
    proj: &ProjectorParams<F>,
    emb: &Array2<F>,
    labels: &Array2<f32>,
    weights: &Array2<f32>,
) -> Result<(F, Array2<F>, ProjectorParams<F>)> {
    let (m, d) = emb.dim();
    if labels.dim() != (m, m) || weights.dim() != (m, m) || proj.w1.nrows() != 2 * d {
        return Err(CadenceError::ShapeMismatch(format!(
            "pair path: {m} embeddings of dim {d}, labels {:?}, weights {:?}, w1 {:?}",
            labels.dim(),
            weights.dim(),
            proj.w1.dim()
        )));
    }
    let h = proj.b1.len();
    let (w1a, w1b) = proj.w1_halves();
    let p_part = emb.dot(&w1a);
    let q_part = emb.dot(&w1b);

    let weight_sum = weights
        .iter()
        .fold(F::zero(), |acc, &w| acc + F::from(w).unwrap());
    let mut d_emb = Array2::<F>::zeros((m, d));
    let mut proj_grads = ProjectorParams::zeros(2 * d, h);
    if weight_sum <= F::zero() {
        return Ok((F::zero(), d_emb, proj_grads));
    }

    let mut loss_sum = F::zero();
    let mut d_p = Array2::<F>::zeros((m, h));
    let mut d_q = Array2::<F>::zeros((m, h));
    let half = F::from(0.5).unwrap();
    for p in 0..m {
        let mut hidden = q_part.clone();
        hidden += &p_part.row(p);
        hidden += &proj.b1;
        hidden.mapv_inplace(|v| v.max(F::zero()));
        let logits = hidden.dot(&proj.w2) + &proj.b2;

        let mut d_logits = Array2::<F>::zeros((m, 2));
        for q in 0..m {
            let w = F::from(weights[[p, q]]).unwrap();
            if w == F::zero() {
                continue;
            }
            let label = F::from(labels[[p, q]]).unwrap();
            let (ce, probs) = row_ce(logits[[q, 0]], logits[[q, 1]], label);
            loss_sum += w * ce;
            let scale = w / weight_sum;
            let positive = label > half;
            d_logits[[q, 0]] = (probs[0] - if positive { F::zero() } else { F::one() }) * scale;
            d_logits[[q, 1]] = (probs[1] - if positive { F::one() } else { F::zero() }) * scale;
        }

        proj_grads.w2 = proj_grads.w2 + hidden.t().dot(&d_logits);
        proj_grads.b2 = proj_grads.b2 + d_logits.sum_axis(Axis(0));
        let mut d_hidden = d_logits.dot(&proj.w2.t());
        d_hidden.zip_mut_with(&hidden, |g, &hv| {
            if hv <= F::zero() {
                *g = F::zero();
            }
        });
        let row_sum = d_hidden.sum_axis(Axis(0));
        proj_grads.b1 += &row_sum;
        d_p.row_mut(p).assign(&row_sum);
        d_q += &d_hidden;
    }

    let d_w1a = emb.t().dot(&d_p);
    let d_w1b = emb.t().dot(&d_q);
    proj_grads.w1 = concatenate![Axis(0), d_w1a, d_w1b];
    d_emb = d_p.dot(&w1a.t()) + d_q.dot(&w1b.t());
    Ok((loss_sum / weight_sum, d_emb, proj_grads))
}

/// Coordinates checked per call when the model is larger than this.
const MAX_CHECKED_COORDS: usize = 2048;

/// Maximum relative error between analytic gradients and central finite
/// differences of the direct-path loss, over all coordinates (or a seeded
/// sample of 2048 on larger models).
pub fn gradient_check(
    params: &ModelParams<f64>,
    batch: &PairBatch,
    epsilon: f64,
) -> Result<f64> {
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(CadenceError::InvalidEpsilon(epsilon));
    }
    let (_, grads) = backprop_gradients(params, batch)?;
    let analytic = grads.flatten();

    let count = analytic.len();
    let coords: Vec<usize> = if count <= MAX_CHECKED_COORDS {
        (0..count).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x00C0_FFEE);
        sample(&mut rng, count, MAX_CHECKED_COORDS).into_vec()
    };

    let mut flat = params.flatten();
    let mut probe = params.clone();
    let mut max_rel = 0.0f64;
    for &i in &coords {
        let numeric = central_difference(&mut probe, &mut flat, i, epsilon, batch)?;
        max_rel = max_rel.max(relative_error(analytic[i], numeric));
    }
    Ok(max_rel)
}

/// Central difference of the direct-path loss along one flat coordinate.
pub fn central_difference(
    probe: &mut ModelParams<f64>,
    flat: &mut Array1<f64>,
    coord: usize,
    epsilon: f64,
    batch: &PairBatch,
) -> Result<f64> {
    let orig = flat[coord];
    flat[coord] = orig + epsilon;
    probe.assign_from_flat(flat)?;
    let plus = pair_loss_direct(probe, batch)?;
    flat[coord] = orig - epsilon;
    probe.assign_from_flat(flat)?;
    let minus = pair_loss_direct(probe, batch)?;
    flat[coord] = orig;
    probe.assign_from_flat(flat)?;
    Ok((plus - minus) / (2.0 * epsilon))
}

/// |a − n| / max(|a|, |n|, 1e-8).
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}
