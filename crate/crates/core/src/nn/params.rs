use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nn::tensor::Tensor;

static NEXT_SET_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_SET_ID.fetch_add(1, Ordering::Relaxed)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Parameter {
    pub name: String,
    pub value: Tensor,
    pub grad: Tensor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    Weight,
    Bias,
}

#[derive(Clone, Debug)]
pub struct ParamSpec {
    pub name: String,
    pub shape: Vec<usize>,
    pub kind: ParamKind,
}

impl ParamSpec {
    pub fn weight(name: impl Into<String>, rows: usize, cols: usize) -> Self {
        Self { name: name.into(), shape: vec![rows, cols], kind: ParamKind::Weight }
    }

    pub fn bias(name: impl Into<String>, len: usize) -> Self {
        Self { name: name.into(), shape: vec![len], kind: ParamKind::Bias }
    }
}

/// An ordered, named collection of trainable tensors.
///
/// Each set carries a process-unique id so a [`Tape`](crate::nn::Tape) holding
/// nodes from several sets (generator and critic in one graph) can route
/// gradients to the right owner. Cloning keeps the id; use
/// [`ParamSet::detached`] for an independent copy.
#[derive(Debug)]
pub struct ParamSet {
    id: u64,
    params: Vec<Parameter>,
    index: HashMap<String, usize>,
}

impl Clone for ParamSet {
    fn clone(&self) -> Self {
        Self { id: self.id, params: self.params.clone(), index: self.index.clone() }
    }
}

impl PartialEq for ParamSet {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
    }
}

impl ParamSet {
    pub fn new() -> Self {
        Self { id: fresh_id(), params: Vec::new(), index: HashMap::new() }
    }

    pub fn detached(&self) -> Self {
        Self { id: fresh_id(), ..self.clone() }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Tensor) -> Result<usize> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(Error::Invalid(format!("duplicate parameter name `{name}`")));
        }
        let grad = Tensor::zeros(value.shape());
        self.params.push(Parameter { name: name.clone(), value, grad });
        self.index.insert(name, self.params.len() - 1);
        Ok(self.params.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn get(&self, i: usize) -> &Parameter {
        &self.params[i]
    }

    pub fn get_mut(&mut self, i: usize) -> &mut Parameter {
        &mut self.params[i]
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Parameter> {
        self.params.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut Parameter> {
        self.params.iter_mut()
    }

    pub fn zero_grad(&mut self) {
        for p in &mut self.params {
            p.grad.fill(0.0);
        }
    }

    pub fn num_values(&self) -> usize {
        self.params.iter().map(|p| p.value.len()).sum()
    }

    /// Largest absolute parameter value in the set.
    pub fn max_abs(&self) -> f64 {
        self.params.iter().fold(0.0, |m, p| m.max(p.value.max_abs()))
    }

    /// Clamps every value into `[-bound, bound]`.
    pub fn clamp(&mut self, bound: f64) {
        for p in &mut self.params {
            p.value.data_mut().iter_mut().for_each(|v| *v = v.clamp(-bound, bound));
        }
    }
}

impl Default for ParamSet {
    fn default() -> Self {
        Self::new()
    }
}

/// Xavier-uniform weights, zero biases. Deterministic for a given seed and spec list.
pub fn init_params(specs: &[ParamSpec], seed: u64) -> Result<ParamSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = ParamSet::new();
    for spec in specs {
        let n: usize = spec.shape.iter().product();
        let value = match spec.kind {
            ParamKind::Bias => Tensor::zeros(&spec.shape),
            ParamKind::Weight => {
                let (fan_out, fan_in) = match spec.shape.as_slice() {
                    [r, c] => (*r, *c),
                    [n] => (*n, *n),
                    _ => return Err(Error::Invalid(format!("weight `{}` must be rank 1 or 2", spec.name))),
                };
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let data = (0..n).map(|_| rng.random_range(-limit..=limit)).collect();
                Tensor::new(spec.shape.clone(), data)?
            }
        };
        set.insert(spec.name.clone(), value)?;
    }
    Ok(set)
}
