use serde::{Deserialize, Serialize};

use super::{mismatch, Tensor, TensorError};

/// Moment estimates and hyperparameters for Adam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step: u64,
    pub m: Vec<Tensor>,
    pub v: Vec<Tensor>,
}

impl AdamState {
    /// Zeroed moments shaped like `params`, lr 0.001, β = (0.9, 0.999).
    pub fn new(params: &[Tensor]) -> Self {
        Self::with_lr(params, 0.001)
    }

    pub fn with_lr(params: &[Tensor], lr: f64) -> Self {
        let zeros: Vec<Tensor> = params.iter().map(|p| Tensor::zeros(p.shape())).collect();
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: zeros.clone(),
            v: zeros,
        }
    }
}

/// One bias-corrected Adam update, in place.
pub fn adam_step(params: &mut [Tensor], grads: &[Tensor], state: &mut AdamState) -> Result<(), TensorError> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(mismatch(
            "adam_step",
            format!("{} params, {} grads, {} moments", params.len(), grads.len(), state.m.len()),
        ));
    }
    for (k, (p, g)) in params.iter().zip(grads).enumerate() {
        if p.shape() != g.shape() || p.shape() != state.m[k].shape() {
            return Err(mismatch(
                "adam_step",
                format!("parameter {k}: {:?} vs grad {:?}", p.shape(), g.shape()),
            ));
        }
    }
    state.step += 1;
    let t = state.step as i32;
    let correction1 = 1.0 - state.beta1.powi(t);
    let correction2 = 1.0 - state.beta2.powi(t);
    for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
        let m = state.m[k].data_mut();
        let v = state.v[k].data_mut();
        for (i, (w, &gi)) in p.data_mut().iter_mut().zip(g.data()).enumerate() {
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * gi;
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * gi * gi;
            let m_hat = m[i] / correction1;
            let v_hat = v[i] / correction2;
            *w -= state.lr * m_hat / (v_hat.sqrt() + state.eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut params = vec![Tensor::new(vec![2], vec![0.5, -0.25]).unwrap()];
        let before = params.clone();
        let mut state = AdamState::new(&params);
        adam_step(&mut params, &[Tensor::zeros(&[2])], &mut state).unwrap();
        assert_eq!(params, before);
        assert_eq!(state.step, 1);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut params = vec![Tensor::new(vec![3], vec![0.0, 1.0, -1.0]).unwrap()];
        let before = params[0].data().to_vec();
        let grads = vec![Tensor::new(vec![3], vec![0.7, -3.0, 0.01]).unwrap()];
        let mut state = AdamState::new(&params);
        adam_step(&mut params, &grads, &mut state).unwrap();
        for ((after, b), g) in params[0].data().iter().zip(&before).zip(grads[0].data()) {
            let delta = after - b;
            assert!(delta.abs() >= 0.00099 && delta.abs() <= 0.001, "{delta}");
            assert_eq!(delta.signum(), -g.signum());
        }
    }

    #[test]
    fn shape_mismatch() {
        let mut params = vec![Tensor::zeros(&[2])];
        let mut state = AdamState::new(&params);
        assert!(adam_step(&mut params, &[Tensor::zeros(&[3])], &mut state).is_err());
    }
}
