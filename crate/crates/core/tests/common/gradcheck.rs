//! Central finite-difference checks of every differentiable op, layer and
//! the end-to-end critic(generator(x)) composition. Each group returns the
//! worst relative error of every check it ran.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wordlen::corpus::Emotion;
use wordlen::model::{Critic, Generator};
use wordlen::nn::{init_params, BiLstm, Linear, LstmCell, ParamSet, ParamSpec, Tape, Tensor, Var};

pub const TRIALS: usize = 24;
const H: f64 = 1e-5;
pub const TOL: f64 = 1e-4;

fn rel_err(a: f64, n: f64) -> f64 {
    (a - n).abs() / (a.abs() + n.abs()).max(1e-6)
}

/// Reduces a vector to a scalar with fixed pseudo-random weights so every
/// output element contributes a distinct gradient.
fn weighted_sum(tape: &mut Tape, v: Var, seed: u64) -> Var {
    let n = tape.value(v).len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = tape.leaf(Tensor::new(tape.value(v).shape().to_vec(), (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap());
    let p = tape.mul(v, w).unwrap();
    tape.sum(p)
}

/// Compares analytic parameter gradients with central differences at
/// `TRIALS` random coordinates. Returns the worst relative error.
fn check<F>(name: &str, set: &ParamSet, seed: u64, f: F) -> (String, f64)
where
    F: Fn(&mut Tape, &ParamSet) -> Var,
{
    let mut analytic = set.clone();
    analytic.zero_grad();
    let mut tape = Tape::new();
    let out = f(&mut tape, &analytic);
    assert_eq!(tape.value(out).len(), 1, "{name}: output must be scalar");
    tape.backward(out, 1.0).accumulate(&tape, &mut analytic);

    let eval = |s: &ParamSet| {
        let mut t = Tape::new();
        let o = f(&mut t, s);
        t.value(o).item()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..TRIALS {
        let pi = rng.random_range(0..set.len());
        let ei = rng.random_range(0..set.get(pi).value.len());
        let mut plus = set.clone();
        plus.get_mut(pi).value.data_mut()[ei] += H;
        let mut minus = set.clone();
        minus.get_mut(pi).value.data_mut()[ei] -= H;
        let numeric = (eval(&plus) - eval(&minus)) / (2.0 * H);
        let a = analytic.get(pi).grad.data()[ei];
        let e = rel_err(a, numeric);
        if e > TOL {
            println!("{name}: {}[{ei}] analytic {a} numeric {numeric} rel err {e:.2e}", set.get(pi).name);
        }
        worst = worst.max(e);
    }
    println!("{name}: worst relative error {worst:.2e} over {TRIALS} trials");
    (name.to_string(), worst)
}

fn random_set(shapes: &[(&str, Vec<usize>)], seed: u64) -> ParamSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = ParamSet::new();
    for (name, shape) in shapes {
        let n = shape.iter().product();
        set.insert(*name, Tensor::new(shape.clone(), (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()).unwrap();
    }
    set
}

pub fn primitive_ops() -> Vec<(String, f64)> {
    let mut out = Vec::new();
    let set = random_set(&[("a", vec![4, 3]), ("x", vec![3]), ("b", vec![4, 2]), ("y", vec![4])], 1);
    out.push(check("matmul mat-vec", &set, 10, |t, s| {
        let (a, x) = (t.param(s, 0), t.param(s, 1));
        let m = t.matmul(a, x).unwrap();
        weighted_sum(t, m, 1)
    }));
    let set2 = random_set(&[("a", vec![2, 4]), ("b", vec![4, 3])], 2);
    out.push(check("matmul mat-mat", &set2, 11, |t, s| {
        let (a, b) = (t.param(s, 0), t.param(s, 1));
        let m = t.matmul(a, b).unwrap();
        weighted_sum(t, m, 2)
    }));
    out.push(check("add sub mul scale", &set, 12, |t, s| {
        let (y, x) = (t.param(s, 3), t.param(s, 1));
        let x4 = t.concat(&[x, x]).unwrap();
        let x4 = t.slice(x4, 1, 4).unwrap();
        let a = t.add(y, x4).unwrap();
        let b = t.sub(a, y).unwrap();
        let c = t.mul(b, a).unwrap();
        let d = t.scale(c, -1.7);
        weighted_sum(t, d, 3)
    }));
    out.push(check("tanh sigmoid", &set, 13, |t, s| {
        let y = t.param(s, 3);
        let a = t.tanh(y);
        let b = t.sigmoid(y);
        let c = t.mul(a, b).unwrap();
        weighted_sum(t, c, 4)
    }));
    out.push(check("softmax", &set, 14, |t, s| {
        let y = t.param(s, 3);
        let p = t.softmax(y).unwrap();
        weighted_sum(t, p, 5)
    }));
    out.push(check("cross entropy", &set, 15, |t, s| {
        let y = t.param(s, 3);
        t.cross_entropy(y, 2).unwrap()
    }));
    out.push(check("mean sum_sq_diff", &set, 16, |t, s| {
        let (y, x) = (t.param(s, 3), t.param(s, 1));
        let x4 = t.concat(&[x, x]).unwrap();
        let x4 = t.slice(x4, 2, 4).unwrap();
        let d = t.sum_sq_diff(y, x4).unwrap();
        let m = t.mean(y);
        t.add(d, m).unwrap()
    }));
    out
}

fn layer_set(specs: &[ParamSpec], seed: u64) -> ParamSet {
    let mut set = init_params(specs, seed).unwrap();
    // nonzero biases so their gradients are exercised away from the origin
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb1a5);
    for p in set.iter_mut() {
        p.value.data_mut().iter_mut().for_each(|v| *v += rng.random_range(-0.2..0.2));
    }
    set
}

fn inputs(t: &mut Tape, n: usize, width: usize, seed: u64) -> Vec<Var> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| t.leaf(Tensor::vector((0..width).map(|_| rng.random_range(-1.0..1.0)).collect()))).collect()
}

pub fn linear_layer() -> Vec<(String, f64)> {
    let mut out = Vec::new();
    let set = layer_set(&Linear::specs("l", 5, 3), 3);
    let layer = Linear::from_set(&set, "l").unwrap();
    out.push(check("linear", &set, 20, |t, s| {
        let x = inputs(t, 1, 5, 7)[0];
        let y = layer.forward(t, s, x).unwrap();
        weighted_sum(t, y, 6)
    }));
    out
}

pub fn lstm_layer() -> Vec<(String, f64)> {
    let mut out = Vec::new();
    let set = layer_set(&LstmCell::specs("c", 3, 4), 4);
    let cell = LstmCell::from_set(&set, "c").unwrap();
    out.push(check("lstm step", &set, 21, |t, s| {
        let b = cell.bind(t, s);
        let xs = inputs(t, 3, 4, 8);
        let x = inputs(t, 1, 3, 9)[0];
        let (h, c) = b.step(t, x, xs[0], xs[1]).unwrap();
        let hc = t.concat(&[h, c]).unwrap();
        weighted_sum(t, hc, 7)
    }));
    out.push(check("lstm sequence", &set, 22, |t, s| {
        let xs = inputs(t, 5, 3, 10);
        let hs = cell.run(t, s, &xs).unwrap();
        let all = t.concat(&hs).unwrap();
        weighted_sum(t, all, 8)
    }));
    out
}

pub fn bilstm_layer() -> Vec<(String, f64)> {
    let mut out = Vec::new();
    let set = layer_set(&BiLstm::specs("bi", 3, 2), 5);
    let bi = BiLstm::from_set(&set, "bi").unwrap();
    out.push(check("bilstm", &set, 23, |t, s| {
        let xs = inputs(t, 4, 3, 11);
        let hs = bi.forward(t, s, &xs).unwrap();
        let all = t.concat(&hs).unwrap();
        weighted_sum(t, all, 9)
    }));
    out
}

pub fn generator_end_to_end() -> Vec<(String, f64)> {
    let mut out = Vec::new();
    let data = super::dataset(&[5], &[Emotion::Happy], 1, 0.05, 1);
    let g = Generator::new(super::tiny_model(), 6).unwrap();
    let z = vec![0.3, -0.2, 0.5, 0.1];
    out.push(check("generator lengths + emotion head", &g.params, 24, |t, s| {
        let gen = Generator::from_params(g.config.clone(), s.clone()).unwrap();
        let out = gen.forward(t, &data[0], Some(&z)).unwrap();
        let l = weighted_sum(t, out.lengths, 10);
        let ce = t.cross_entropy(out.emotion_logits, Emotion::Happy.index()).unwrap();
        t.add(l, ce).unwrap()
    }));
    out
}

pub fn critic_of_generator_end_to_end() -> Vec<(String, f64)> {
    let mut out = Vec::new();
    let data = super::dataset(&[2], &[Emotion::Anger], 1, 0.05, 2);
    let model = super::tiny_model();
    let g = Generator::new(model.clone(), 7).unwrap();
    let mut c = Critic::new(model.clone(), 8).unwrap();
    // unclipped critic weights keep the gradients well away from zero
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in c.params.iter_mut() {
        p.value.data_mut().iter_mut().for_each(|v| *v = rng.random_range(-0.5..0.5));
    }
    let z = vec![-0.4, 0.2, 0.0, 0.7];
    let crit = c.clone();
    out.push(check("critic(generator) wrt generator", &g.params, 25, |t, s| {
        let gen = Generator::from_params(model.clone(), s.clone()).unwrap();
        let out = gen.forward(t, &data[0], Some(&z)).unwrap();
        crit.score(t, out.lengths, None).unwrap()
    }));
    let fake = g.predict(&data[0], Some(&z)).unwrap().0;
    out.push(check("critic wrt critic", &c.params, 26, |t, s| {
        let cr = Critic::from_params(model.clone(), s.clone()).unwrap();
        let x = t.leaf(Tensor::vector(fake.clone()));
        cr.score(t, x, None).unwrap()
    }));
    out
}
