//! Weighted binary-softmax cross-entropy over pair logits, normalized by the
//! total weight so zero-weight entries contribute nothing.

use ndarray::{Array1, Array2, NdFloat};

use crate::error::{CadenceError, Result};

/// Numerically stable per-row cross-entropy and softmax against class
/// `label ∈ {0, 1}`.
pub(crate) fn row_ce<F: NdFloat>(z0: F, z1: F, label: F) -> (F, [F; 2]) {
    let m = z0.max(z1);
    let e0 = (z0 - m).exp();
    let e1 = (z1 - m).exp();
    let lse = m + (e0 + e1).ln();
    let target = if label > F::from(0.5).unwrap() { z1 } else { z0 };
    let p0 = e0 / (e0 + e1);
    (lse - target, [p0, F::one() - p0])
}

/// Mean weighted cross-entropy: Σ w·CE / Σ w. Labels select the positive
/// class when 1. Returns 0 when every weight is zero.
pub fn contrastive_loss<F: NdFloat>(
    logits: &Array2<F>,
    labels: &Array1<F>,
    weights: &Array1<F>,
) -> Result<F> {
    contrastive_loss_grad(logits, labels, weights).map(|(loss, _)| loss)
}

/// [`contrastive_loss`] plus its gradient with respect to the logits.
pub fn contrastive_loss_grad<F: NdFloat>(
    logits: &Array2<F>,
    labels: &Array1<F>,
    weights: &Array1<F>,
) -> Result<(F, Array2<F>)> {
    let m = logits.nrows();
    if logits.ncols() != 2 || labels.len() != m || weights.len() != m {
        return Err(CadenceError::ShapeMismatch(format!(
            "loss inputs: logits {:?}, {} labels, {} weights",
            logits.dim(),
            labels.len(),
            weights.len()
        )));
    }
    let weight_sum = weights.sum();
    let mut d_logits = Array2::<F>::zeros((m, 2));
    if weight_sum <= F::zero() {
        return Ok((F::zero(), d_logits));
    }

    let mut loss_sum = F::zero();
    for i in 0..m {
        let w = weights[i];
        if w == F::zero() {
            continue;
        }
        let label = labels[i];
        let (ce, p) = row_ce(logits[[i, 0]], logits[[i, 1]], label);
        loss_sum += w * ce;
        let scale = w / weight_sum;
        let positive = label > F::from(0.5).unwrap();
        d_logits[[i, 0]] = (p[0] - if positive { F::zero() } else { F::one() }) * scale;
        d_logits[[i, 1]] = (p[1] - if positive { F::one() } else { F::zero() }) * scale;
    }
    Ok((loss_sum / weight_sum, d_logits))
}
