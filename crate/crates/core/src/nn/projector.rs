//! The pairwise projector: a 2-layer perceptron mapping a concatenated
//! embedding pair (2d values) through a ReLU hidden layer to two logits.

use ndarray::{s, Array1, Array2, NdFloat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CadenceError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorParams<F> {
    /// (2d, hidden).
    pub w1: Array2<F>,
    pub b1: Array1<F>,
    /// (hidden, 2).
    pub w2: Array2<F>,
    pub b2: Array1<F>,
}

impl<F: NdFloat> ProjectorParams<F> {
    pub fn init(input_dim: usize, hidden: usize, seed: u64) -> Result<Self> {
        if input_dim == 0 || hidden == 0 || !input_dim.is_multiple_of(2) {
            return Err(CadenceError::InvalidConfig(format!(
                "projector dims input {input_dim} hidden {hidden}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut uniform = |fan_in: usize, cols: usize| {
            let bound = (6.0 / fan_in as f64).sqrt();
            Array2::from_shape_fn((fan_in, cols), |_| {
                F::from(rng.gen_range(-bound..bound)).unwrap()
            })
        };
        Ok(Self {
            w1: uniform(input_dim, hidden),
            b1: Array1::zeros(hidden),
            w2: uniform(hidden, 2),
            b2: Array1::zeros(2),
        })
    }

    pub fn zeros(input_dim: usize, hidden: usize) -> Self {
        Self {
            w1: Array2::zeros((input_dim, hidden)),
            b1: Array1::zeros(hidden),
            w2: Array2::zeros((hidden, 2)),
            b2: Array1::zeros(2),
        }
    }

    pub fn param_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    /// Halves of the first layer acting on the pair's left and right
    /// embeddings: w1ᵀ·concat(a, b) = w1a ᵀ·a + w1b ᵀ·b.
    pub fn w1_halves(&self) -> (ndarray::ArrayView2<'_, F>, ndarray::ArrayView2<'_, F>) {
        let d = self.w1.nrows() / 2;
        (self.w1.slice(s![..d, ..]), self.w1.slice(s![d.., ..]))
    }
}

/// Forward pass over explicit pair-feature rows (M, 2d) → logits (M, 2).
pub fn projector_forward<F: NdFloat>(
    params: &ProjectorParams<F>,
    pair_features: &Array2<F>,
) -> Result<Array2<F>> {
    if pair_features.ncols() != params.w1.nrows() {
        return Err(CadenceError::ShapeMismatch(format!(
            "projector input has {} columns, weights expect {}",
            pair_features.ncols(),
            params.w1.nrows()
        )));
    }
    let mut hidden = pair_features.dot(&params.w1);
    hidden += &params.b1;
    hidden.mapv_inplace(|v| v.max(F::zero()));
    Ok(hidden.dot(&params.w2) + &params.b2)
}

/// All ordered pair concatenations of a batch of embeddings: row p·m + q is
/// concat(emb[p], emb[q]), covering both orderings of every pair.
pub fn build_pair_features<F: NdFloat>(emb: &Array2<F>) -> Array2<F> {
    let (m, d) = emb.dim();
    let mut feats = Array2::<F>::zeros((m * m, 2 * d));
    for p in 0..m {
        for q in 0..m {
            let mut row = feats.row_mut(p * m + q);
            row.slice_mut(s![..d]).assign(&emb.row(p));
            row.slice_mut(s![d..]).assign(&emb.row(q));
        }
    }
    feats
}
