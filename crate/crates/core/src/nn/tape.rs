//! Reverse-mode automatic differentiation over [`Tensor`] values.
//!
//! A [`Tape`] records one forward pass. Every operation appends a node holding
//! its forward value and the indices of its inputs; [`Tape::backward`] walks the
//! nodes in reverse exactly once and returns the adjoint of every node. Parameter
//! gradients are then folded into a [`ParamSet`] with [`Gradients::accumulate`],
//! which adds to whatever gradient the set already holds. That additive contract
//! is what lets the training loop accumulate over variable-length samples.

use crate::error::{Error, Result};
use crate::nn::params::ParamSet;
use crate::nn::tensor::Tensor;

/// Handle to a node on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug)]
enum Op {
    Leaf,
    Param { set: u64, index: usize },
    MatMul(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Scale(Var, f64),
    Tanh(Var),
    Sigmoid(Var),
    Softmax(Var),
    CrossEntropy { logits: Var, target: usize },
    Concat(Vec<Var>),
    Slice { src: Var, start: usize },
    Sum(Var),
    Mean(Var),
    SumSqDiff(Var, Var),
}

struct Node {
    value: Tensor,
    op: Op,
}

#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

fn shape_err(op: &'static str, a: &Tensor, b: &Tensor) -> Error {
    Error::Shape { op, detail: format!("{:?} vs {:?}", a.shape(), b.shape()) }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl Tape {
    pub fn new() -> Self {
        Self { nodes: Vec::with_capacity(256) }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    /// Constant input. Its adjoint is still reported by [`Tape::backward`].
    pub fn leaf(&mut self, t: Tensor) -> Var {
        self.push(t, Op::Leaf)
    }

    pub fn param(&mut self, set: &ParamSet, index: usize) -> Var {
        let value = set.get(index).value.clone();
        self.push(value, Op::Param { set: set.id(), index })
    }

    /// Matrix product. `a` is `[m, k]`; `b` is either a `[k]` vector or a `[k, n]` matrix.
    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (ta, tb) = (self.value(a), self.value(b));
        if ta.rank() != 2 || ta.shape()[1] != tb.shape()[0] || tb.rank() > 2 {
            return Err(shape_err("matmul", ta, tb));
        }
        let (m, k) = (ta.shape()[0], ta.shape()[1]);
        let out = if tb.rank() == 1 {
            let (ad, bd) = (ta.data(), tb.data());
            let data = (0..m)
                .map(|i| ad[i * k..(i + 1) * k].iter().zip(bd).map(|(x, y)| x * y).sum())
                .collect();
            Tensor::vector(data)
        } else {
            let n = tb.shape()[1];
            let (ad, bd) = (ta.data(), tb.data());
            let mut data = vec![0.0; m * n];
            for i in 0..m {
                for p in 0..k {
                    let av = ad[i * k + p];
                    if av == 0.0 {
                        continue;
                    }
                    let row = &bd[p * n..(p + 1) * n];
                    for (o, bv) in data[i * n..(i + 1) * n].iter_mut().zip(row) {
                        *o += av * bv;
                    }
                }
            }
            Tensor::matrix(m, n, data)?
        };
        Ok(self.push(out, Op::MatMul(a, b)))
    }

    fn zip_with(&mut self, op: &'static str, a: Var, b: Var, f: impl Fn(f64, f64) -> f64) -> Result<Tensor> {
        let (ta, tb) = (self.value(a), self.value(b));
        if ta.shape() != tb.shape() {
            return Err(shape_err(op, ta, tb));
        }
        let data = ta.data().iter().zip(tb.data()).map(|(x, y)| f(*x, *y)).collect();
        Tensor::new(ta.shape().to_vec(), data)
    }

    fn map(&self, a: Var, f: impl Fn(f64) -> f64) -> Tensor {
        let t = self.value(a);
        Tensor::new(t.shape().to_vec(), t.data().iter().map(|x| f(*x)).collect())
            .expect("same shape")
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let t = self.zip_with("add", a, b, |x, y| x + y)?;
        Ok(self.push(t, Op::Add(a, b)))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        let t = self.zip_with("sub", a, b, |x, y| x - y)?;
        Ok(self.push(t, Op::Sub(a, b)))
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        let t = self.zip_with("mul", a, b, |x, y| x * y)?;
        Ok(self.push(t, Op::Mul(a, b)))
    }

    pub fn scale(&mut self, a: Var, k: f64) -> Var {
        let t = self.map(a, |x| x * k);
        self.push(t, Op::Scale(a, k))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let t = self.map(a, f64::tanh);
        self.push(t, Op::Tanh(a))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let t = self.map(a, sigmoid);
        self.push(t, Op::Sigmoid(a))
    }

    pub fn softmax(&mut self, a: Var) -> Result<Var> {
        let t = self.value(a);
        if t.rank() != 1 || t.is_empty() {
            return Err(Error::Shape { op: "softmax", detail: format!("expected a vector, got {:?}", t.shape()) });
        }
        let max = t.data().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = t.data().iter().map(|x| (x - max).exp()).collect();
        let z: f64 = exps.iter().sum();
        let out = Tensor::vector(exps.into_iter().map(|e| e / z).collect());
        Ok(self.push(out, Op::Softmax(a)))
    }

    /// `-ln softmax(logits)[target]`, computed stably.
    pub fn cross_entropy(&mut self, logits: Var, target: usize) -> Result<Var> {
        let t = self.value(logits);
        if t.rank() != 1 || target >= t.len() {
            return Err(Error::Shape {
                op: "cross_entropy",
                detail: format!("target {} for logits {:?}", target, t.shape()),
            });
        }
        let max = t.data().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + t.data().iter().map(|x| (x - max).exp()).sum::<f64>().ln();
        let loss = lse - t.data()[target];
        Ok(self.push(Tensor::scalar(loss), Op::CrossEntropy { logits, target }))
    }

    /// Concatenation of vectors along their only axis.
    pub fn concat(&mut self, parts: &[Var]) -> Result<Var> {
        if parts.is_empty() {
            return Err(Error::Shape { op: "concat", detail: "no inputs".into() });
        }
        let mut data = Vec::new();
        for &p in parts {
            let t = self.value(p);
            if t.rank() != 1 {
                return Err(Error::Shape { op: "concat", detail: format!("expected vectors, got {:?}", t.shape()) });
            }
            data.extend_from_slice(t.data());
        }
        Ok(self.push(Tensor::vector(data), Op::Concat(parts.to_vec())))
    }

    /// Contiguous sub-vector `[start, start + len)`.
    pub fn slice(&mut self, a: Var, start: usize, len: usize) -> Result<Var> {
        let t = self.value(a);
        if t.rank() != 1 || start + len > t.len() || len == 0 {
            return Err(Error::Shape {
                op: "slice",
                detail: format!("[{}, {}) of {:?}", start, start + len, t.shape()),
            });
        }
        let out = Tensor::vector(t.data()[start..start + len].to_vec());
        Ok(self.push(out, Op::Slice { src: a, start }))
    }

    pub fn sum(&mut self, a: Var) -> Var {
        let s = self.value(a).data().iter().sum();
        self.push(Tensor::scalar(s), Op::Sum(a))
    }

    pub fn mean(&mut self, a: Var) -> Var {
        let t = self.value(a);
        let m = t.data().iter().sum::<f64>() / t.len() as f64;
        self.push(Tensor::scalar(m), Op::Mean(a))
    }

    /// `sum_i (a_i - b_i)^2`.
    pub fn sum_sq_diff(&mut self, a: Var, b: Var) -> Result<Var> {
        let (ta, tb) = (self.value(a), self.value(b));
        if ta.shape() != tb.shape() {
            return Err(shape_err("sum_sq_diff", ta, tb));
        }
        let s = ta.data().iter().zip(tb.data()).map(|(x, y)| (x - y) * (x - y)).sum();
        Ok(self.push(Tensor::scalar(s), Op::SumSqDiff(a, b)))
    }

    /// Reverse sweep from `output`, seeded with `seed` (applied to every element
    /// of the output; for scalar losses this is the loss weight).
    pub fn backward(&self, output: Var, seed: f64) -> Gradients {
        let n = output.0 + 1;
        let mut grads: Vec<Option<Vec<f64>>> = vec![None; n];
        grads[output.0] = Some(vec![seed; self.nodes[output.0].value.len()]);

        for idx in (0..n).rev() {
            let Some(g) = grads[idx].take() else { continue };
            let node = &self.nodes[idx];
            match &node.op {
                Op::Leaf | Op::Param { .. } => {}
                Op::MatMul(a, b) => {
                    let (ta, tb) = (self.value(*a), self.value(*b));
                    let (m, k) = (ta.shape()[0], ta.shape()[1]);
                    let (ad, bd) = (ta.data(), tb.data());
                    let mut ga = vec![0.0; m * k];
                    let mut gb = vec![0.0; tb.len()];
                    if tb.rank() == 1 {
                        for i in 0..m {
                            let gi = g[i];
                            if gi == 0.0 {
                                continue;
                            }
                            let arow = &ad[i * k..(i + 1) * k];
                            for (p, (gav, gbv)) in ga[i * k..(i + 1) * k].iter_mut().zip(gb.iter_mut()).enumerate() {
                                *gav += gi * bd[p];
                                *gbv += gi * arow[p];
                            }
                        }
                    } else {
                        let nn = tb.shape()[1];
                        for i in 0..m {
                            for p in 0..k {
                                let brow = &bd[p * nn..(p + 1) * nn];
                                let grow = &g[i * nn..(i + 1) * nn];
                                let mut acc = 0.0;
                                for (gv, bv) in grow.iter().zip(brow) {
                                    acc += gv * bv;
                                }
                                ga[i * k + p] += acc;
                                let av = ad[i * k + p];
                                for (gbv, gv) in gb[p * nn..(p + 1) * nn].iter_mut().zip(grow) {
                                    *gbv += av * gv;
                                }
                            }
                        }
                    }
                    add_grad(&mut grads, *a, &ga);
                    add_grad(&mut grads, *b, &gb);
                }
                Op::Add(a, b) => {
                    add_grad(&mut grads, *a, &g);
                    add_grad(&mut grads, *b, &g);
                }
                Op::Sub(a, b) => {
                    add_grad(&mut grads, *a, &g);
                    let neg: Vec<f64> = g.iter().map(|x| -x).collect();
                    add_grad(&mut grads, *b, &neg);
                }
                Op::Mul(a, b) => {
                    let (ta, tb) = (self.value(*a), self.value(*b));
                    let ga: Vec<f64> = g.iter().zip(tb.data()).map(|(g, y)| g * y).collect();
                    let gb: Vec<f64> = g.iter().zip(ta.data()).map(|(g, x)| g * x).collect();
                    add_grad(&mut grads, *a, &ga);
                    add_grad(&mut grads, *b, &gb);
                }
                Op::Scale(a, k) => {
                    let ga: Vec<f64> = g.iter().map(|x| x * k).collect();
                    add_grad(&mut grads, *a, &ga);
                }
                Op::Tanh(a) => {
                    let ga: Vec<f64> = g.iter().zip(node.value.data()).map(|(g, y)| g * (1.0 - y * y)).collect();
                    add_grad(&mut grads, *a, &ga);
                }
                Op::Sigmoid(a) => {
                    let ga: Vec<f64> = g.iter().zip(node.value.data()).map(|(g, y)| g * y * (1.0 - y)).collect();
                    add_grad(&mut grads, *a, &ga);
                }
                Op::Softmax(a) => {
                    let y = node.value.data();
                    let dot: f64 = g.iter().zip(y).map(|(g, y)| g * y).sum();
                    let ga: Vec<f64> = g.iter().zip(y).map(|(g, y)| y * (g - dot)).collect();
                    add_grad(&mut grads, *a, &ga);
                }
                Op::CrossEntropy { logits, target } => {
                    let t = self.value(*logits).data();
                    let max = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let exps: Vec<f64> = t.iter().map(|x| (x - max).exp()).collect();
                    let z: f64 = exps.iter().sum();
                    let mut ga: Vec<f64> = exps.iter().map(|e| g[0] * e / z).collect();
                    ga[*target] -= g[0];
                    add_grad(&mut grads, *logits, &ga);
                }
                Op::Concat(parts) => {
                    let mut off = 0;
                    for &p in parts {
                        let len = self.value(p).len();
                        add_grad(&mut grads, p, &g[off..off + len]);
                        off += len;
                    }
                }
                Op::Slice { src, start } => {
                    let len = self.value(*src).len();
                    let mut ga = vec![0.0; len];
                    ga[*start..*start + g.len()].copy_from_slice(&g);
                    add_grad(&mut grads, *src, &ga);
                }
                Op::Sum(a) => {
                    let len = self.value(*a).len();
                    add_grad(&mut grads, *a, &vec![g[0]; len]);
                }
                Op::Mean(a) => {
                    let len = self.value(*a).len();
                    add_grad(&mut grads, *a, &vec![g[0] / len as f64; len]);
                }
                Op::SumSqDiff(a, b) => {
                    let (ta, tb) = (self.value(*a), self.value(*b));
                    let ga: Vec<f64> = ta.data().iter().zip(tb.data()).map(|(x, y)| 2.0 * g[0] * (x - y)).collect();
                    let gb: Vec<f64> = ga.iter().map(|v| -v).collect();
                    add_grad(&mut grads, *a, &ga);
                    add_grad(&mut grads, *b, &gb);
                }
            }
            grads[idx] = Some(g);
        }
        Gradients { grads }
    }
}

fn add_grad(grads: &mut [Option<Vec<f64>>], v: Var, g: &[f64]) {
    match &mut grads[v.0] {
        Some(acc) => acc.iter_mut().zip(g).for_each(|(a, b)| *a += b),
        slot @ None => *slot = Some(g.to_vec()),
    }
}

/// Adjoints produced by one [`Tape::backward`] sweep.
pub struct Gradients {
    grads: Vec<Option<Vec<f64>>>,
}

impl Gradients {
    /// Adjoint of `v`, or `None` if `v` does not influence the output.
    pub fn get(&self, v: Var) -> Option<&[f64]> {
        self.grads.get(v.0).and_then(|g| g.as_deref())
    }

    /// Adds the adjoints of every parameter node bound to `set` into the set's
    /// gradient buffers. Nodes bound to other sets are ignored.
    pub fn accumulate(&self, tape: &Tape, set: &mut ParamSet) {
        let id = set.id();
        for (node, g) in tape.nodes.iter().zip(&self.grads) {
            if let (Op::Param { set: s, index }, Some(g)) = (&node.op, g) {
                if *s == id {
                    let p = set.get_mut(*index);
                    p.grad.data_mut().iter_mut().zip(g).for_each(|(a, b)| *a += b);
                }
            }
        }
    }
}
