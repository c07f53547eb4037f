//! Adam on flat parameter vectors, with bias correction.

use ndarray::{Array1, NdFloat};

use crate::error::{CadenceError, Result};

/// Moment accumulators and hyperparameters. Moment vectors mirror the flat
/// parameter layout.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState<F> {
    pub lr: F,
    pub beta1: F,
    pub beta2: F,
    pub epsilon: F,
    pub step: u64,
    pub m: Array1<F>,
    pub v: Array1<F>,
}

impl<F: NdFloat> OptimizerState<F> {
    pub fn new(param_count: usize, lr: f64, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Self {
            lr: F::from(lr).unwrap(),
            beta1: F::from(beta1).unwrap(),
            beta2: F::from(beta2).unwrap(),
            epsilon: F::from(epsilon).unwrap(),
            step: 0,
            m: Array1::zeros(param_count),
            v: Array1::zeros(param_count),
        }
    }
}

/// One bias-corrected Adam update, in place. Increments the step counter.
pub fn adam_step<F: NdFloat>(
    params: &mut Array1<F>,
    grads: &Array1<F>,
    state: &mut OptimizerState<F>,
) -> Result<()> {
    let n = params.len();
    if grads.len() != n || state.m.len() != n || state.v.len() != n {
        return Err(CadenceError::ShapeMismatch(format!(
            "adam: {} params, {} grads, {} m, {} v",
            n,
            grads.len(),
            state.m.len(),
            state.v.len()
        )));
    }
    state.step += 1;
    let t = state.step as i32;
    let one = F::one();
    let bc1 = one - state.beta1.powi(t);
    let bc2 = one - state.beta2.powi(t);

    for i in 0..n {
        let g = grads[i];
        state.m[i] = state.beta1 * state.m[i] + (one - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (one - state.beta2) * g * g;
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        params[i] -= state.lr * m_hat / (v_hat.sqrt() + state.epsilon);
    }
    Ok(())
}
