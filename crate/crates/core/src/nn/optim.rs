use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::params::ParamSet;
use crate::nn::tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RmsPropConfig {
    pub lr: f64,
    pub decay: f64,
    pub eps: f64,
}

impl Default for RmsPropConfig {
    fn default() -> Self {
        Self { lr: 5e-5, decay: 0.9, eps: 1e-8 }
    }
}

/// RMSProp without momentum:
/// `s <- decay * s + (1 - decay) * g^2`, `theta <- theta - lr * g / (sqrt(s) + eps)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RmsProp {
    pub config: RmsPropConfig,
    accumulators: Vec<Tensor>,
}

impl RmsProp {
    pub fn new(config: RmsPropConfig, params: &ParamSet) -> Self {
        let accumulators = params.iter().map(|p| Tensor::zeros(p.value.shape())).collect();
        Self { config, accumulators }
    }

    pub fn from_accumulators(config: RmsPropConfig, accumulators: Vec<Tensor>) -> Self {
        Self { config, accumulators }
    }

    pub fn accumulators(&self) -> &[Tensor] {
        &self.accumulators
    }

    /// Applies one update from the gradients currently stored in `params`.
    /// Gradients are left in place; callers zero them.
    pub fn step(&mut self, params: &mut ParamSet) -> Result<()> {
        if params.len() != self.accumulators.len() {
            return Err(Error::LengthMismatch { what: "rmsprop state", left: self.accumulators.len(), right: params.len() });
        }
        // validate before mutating anything so a bad gradient leaves the model untouched
        for p in params.iter() {
            if !p.grad.is_finite() {
                return Err(Error::NonFiniteGradient(p.name.clone()));
            }
        }
        let RmsPropConfig { lr, decay, eps } = self.config;
        for (p, s) in params.iter_mut().zip(&mut self.accumulators) {
            let grads = p.grad.data().to_vec();
            for ((v, s), g) in p.value.data_mut().iter_mut().zip(s.data_mut()).zip(grads) {
                *s = decay * *s + (1.0 - decay) * g * g;
                *v -= lr * g / (s.sqrt() + eps);
            }
        }
        Ok(())
    }
}
