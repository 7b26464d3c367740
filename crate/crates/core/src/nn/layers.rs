//! Layer primitives built from tape operations.
//!
//! A layer stores the indices of its parameters inside a [`ParamSet`]. Before a
//! forward pass it is bound to a tape once (`bind`), so a recurrent layer reuses
//! the same parameter nodes across all timesteps and their gradients sum.

use crate::error::{Error, Result};
use crate::nn::params::{ParamSet, ParamSpec};
use crate::nn::tape::{Tape, Var};
use crate::nn::tensor::Tensor;

fn lookup(set: &ParamSet, name: &str) -> Result<usize> {
    set.find(name).ok_or_else(|| Error::Invalid(format!("missing parameter `{name}`")))
}

#[derive(Clone, Debug)]
pub struct Linear {
    w: usize,
    b: usize,
    pub in_dim: usize,
    pub out_dim: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct BoundLinear {
    w: Var,
    b: Var,
}

impl Linear {
    pub fn specs(prefix: &str, in_dim: usize, out_dim: usize) -> Vec<ParamSpec> {
        vec![ParamSpec::weight(format!("{prefix}.w"), out_dim, in_dim), ParamSpec::bias(format!("{prefix}.b"), out_dim)]
    }

    pub fn from_set(set: &ParamSet, prefix: &str) -> Result<Self> {
        let w = lookup(set, &format!("{prefix}.w"))?;
        let b = lookup(set, &format!("{prefix}.b"))?;
        let shape = set.get(w).value.shape().to_vec();
        Ok(Self { w, b, in_dim: shape[1], out_dim: shape[0] })
    }

    pub fn bind(&self, tape: &mut Tape, set: &ParamSet) -> BoundLinear {
        BoundLinear { w: tape.param(set, self.w), b: tape.param(set, self.b) }
    }

    pub fn forward(&self, tape: &mut Tape, set: &ParamSet, x: Var) -> Result<Var> {
        self.bind(tape, set).forward(tape, x)
    }
}

impl BoundLinear {
    /// `W x + b`.
    pub fn forward(&self, tape: &mut Tape, x: Var) -> Result<Var> {
        let wx = tape.matmul(self.w, x)?;
        tape.add(wx, self.b)
    }
}

/// Standard LSTM cell with gates packed as `[i; f; g; o]` rows of one
/// `[4H, in + H]` weight matrix acting on `[x; h_prev]`.
#[derive(Clone, Debug)]
pub struct LstmCell {
    w: usize,
    b: usize,
    pub input: usize,
    pub hidden: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct BoundLstm {
    w: Var,
    b: Var,
    hidden: usize,
}

impl LstmCell {
    pub fn specs(prefix: &str, input: usize, hidden: usize) -> Vec<ParamSpec> {
        vec![
            ParamSpec::weight(format!("{prefix}.w"), 4 * hidden, input + hidden),
            ParamSpec::bias(format!("{prefix}.b"), 4 * hidden),
        ]
    }

    pub fn from_set(set: &ParamSet, prefix: &str) -> Result<Self> {
        let w = lookup(set, &format!("{prefix}.w"))?;
        let b = lookup(set, &format!("{prefix}.b"))?;
        let shape = set.get(w).value.shape().to_vec();
        if shape[0] % 4 != 0 || shape[1] < shape[0] / 4 {
            return Err(Error::Shape { op: "lstm", detail: format!("weight {shape:?}") });
        }
        let hidden = shape[0] / 4;
        Ok(Self { w, b, input: shape[1] - hidden, hidden })
    }

    pub fn bind(&self, tape: &mut Tape, set: &ParamSet) -> BoundLstm {
        BoundLstm { w: tape.param(set, self.w), b: tape.param(set, self.b), hidden: self.hidden }
    }

    /// Zero `(h, c)` state as tape leaves.
    pub fn zero_state(&self, tape: &mut Tape) -> (Var, Var) {
        let h = tape.leaf(Tensor::zeros(&[self.hidden]));
        let c = tape.leaf(Tensor::zeros(&[self.hidden]));
        (h, c)
    }

    /// Runs the cell over `xs` from a zero state, returning every hidden state.
    pub fn run(&self, tape: &mut Tape, set: &ParamSet, xs: &[Var]) -> Result<Vec<Var>> {
        let bound = self.bind(tape, set);
        let (mut h, mut c) = self.zero_state(tape);
        let mut out = Vec::with_capacity(xs.len());
        for &x in xs {
            (h, c) = bound.step(tape, x, h, c)?;
            out.push(h);
        }
        Ok(out)
    }
}

impl BoundLstm {
    pub fn step(&self, tape: &mut Tape, x: Var, h_prev: Var, c_prev: Var) -> Result<(Var, Var)> {
        let hdim = self.hidden;
        for (name, v) in [("h_prev", h_prev), ("c_prev", c_prev)] {
            if tape.value(v).len() != hdim {
                return Err(Error::Shape {
                    op: "lstm_step",
                    detail: format!("{name} has {} values, hidden size is {hdim}", tape.value(v).len()),
                });
            }
        }
        let xh = tape.concat(&[x, h_prev])?;
        let z = tape.matmul(self.w, xh)?;
        let z = tape.add(z, self.b)?;
        let zi = tape.slice(z, 0, hdim)?;
        let zf = tape.slice(z, hdim, hdim)?;
        let zg = tape.slice(z, 2 * hdim, hdim)?;
        let zo = tape.slice(z, 3 * hdim, hdim)?;
        let i = tape.sigmoid(zi);
        let f = tape.sigmoid(zf);
        let g = tape.tanh(zg);
        let o = tape.sigmoid(zo);
        let fc = tape.mul(f, c_prev)?;
        let ig = tape.mul(i, g)?;
        let c = tape.add(fc, ig)?;
        let tc = tape.tanh(c);
        let h = tape.mul(o, tc)?;
        Ok((h, c))
    }
}

/// Bi-directional LSTM: a forward cell over `t = 1..T` and a backward cell over
/// `t = T..1`, concatenated per timestep as `[h_fwd_t; h_bwd_t]`.
#[derive(Clone, Debug)]
pub struct BiLstm {
    pub fwd: LstmCell,
    pub bwd: LstmCell,
}

impl BiLstm {
    pub fn specs(prefix: &str, input: usize, hidden: usize) -> Vec<ParamSpec> {
        let mut v = LstmCell::specs(&format!("{prefix}.fwd"), input, hidden);
        v.extend(LstmCell::specs(&format!("{prefix}.bwd"), input, hidden));
        v
    }

    pub fn from_set(set: &ParamSet, prefix: &str) -> Result<Self> {
        Ok(Self {
            fwd: LstmCell::from_set(set, &format!("{prefix}.fwd"))?,
            bwd: LstmCell::from_set(set, &format!("{prefix}.bwd"))?,
        })
    }

    pub fn output_dim(&self) -> usize {
        self.fwd.hidden + self.bwd.hidden
    }

    pub fn forward(&self, tape: &mut Tape, set: &ParamSet, xs: &[Var]) -> Result<Vec<Var>> {
        if xs.is_empty() {
            return Err(Error::Empty("bilstm"));
        }
        let fwd = self.fwd.run(tape, set, xs)?;
        let rev: Vec<Var> = xs.iter().rev().copied().collect();
        let mut bwd = self.bwd.run(tape, set, &rev)?;
        bwd.reverse();
        fwd.into_iter().zip(bwd).map(|(f, b)| tape.concat(&[f, b])).collect()
    }
}
