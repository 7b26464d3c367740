use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::checkpoint::{Checkpoint, CheckpointMeta, ModelKind, RngState};
use super::{prepare_items, ImleConfig, TrainItem};
use crate::corpus::EncodedSample;
use crate::error::{Error, Result};
use crate::model::{Generator, ModelConfig};
use crate::nn::{RmsProp, Tape, Tensor};

/// The candidate picked out of `m` generations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImleChoice {
    pub index: usize,
    /// Squared euclidean distance to the target.
    pub distance: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest candidate to `target`; ties go to the lowest index.
pub fn select_nearest(candidates: &[Vec<f64>], target: &[f64]) -> Result<ImleChoice> {
    if candidates.is_empty() {
        return Err(Error::Empty("select_nearest"));
    }
    let mut best = ImleChoice { index: 0, distance: f64::INFINITY };
    for (i, c) in candidates.iter().enumerate() {
        if c.len() != target.len() {
            return Err(Error::LengthMismatch { what: "imle candidate", left: c.len(), right: target.len() });
        }
        let d = sq_dist(c, target);
        if d < best.distance || i == 0 {
            best = ImleChoice { index: i, distance: d };
        }
    }
    Ok(best)
}

/// Draws `m` noise vectors from `rng`, generates from each and returns the
/// winning noise vector with its distance.
fn nearest_noise(gen: &Generator, item: &TrainItem, m: usize, rng: &mut ChaCha8Rng) -> Result<(Vec<f64>, ImleChoice)> {
    let spec = gen.config.noise_spec();
    let noises: Vec<Vec<f64>> = (0..m).map(|_| spec.sample(rng)).collect();
    let outputs = noises
        .iter()
        .map(|z| {
            let mut tape = Tape::new();
            let out = gen.forward_rows(&mut tape, &item.rows, &item.emotion_onehot, &item.speaker_onehot, Some(z))?;
            Ok(tape.value(out.lengths).data().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    let choice = select_nearest(&outputs, &item.target)?;
    Ok((noises[choice.index].clone(), choice))
}

/// Runs the winning candidate again on a tape and accumulates `scale` times
/// its gradient into the generator.
fn imle_item(gen: &mut Generator, item: &TrainItem, m: usize, rng: &mut ChaCha8Rng, scale: f64) -> Result<f64> {
    let (z, _) = nearest_noise(gen, item, m, rng)?;
    let mut tape = Tape::new();
    let out = gen.forward_rows(&mut tape, &item.rows, &item.emotion_onehot, &item.speaker_onehot, Some(&z))?;
    let target = tape.leaf(Tensor::vector(item.target.clone()));
    let loss = tape.sum_sq_diff(out.lengths, target)?;
    let value = tape.value(loss).item();
    let grads = tape.backward(loss, scale);
    grads.accumulate(&tape, &mut gen.params);
    Ok(value)
}

/// Loss of the IMLE objective for one sample: the smallest squared distance
/// between the target and `m` generations drawn from `seed`. No gradients.
pub fn imle_loss(gen: &Generator, sample: &EncodedSample, m: usize, seed: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Invalid("m must be at least 1".into()));
    }
    let items = prepare_items(std::slice::from_ref(sample), gen.config.input_mode, None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(nearest_noise(gen, &items[0], m, &mut rng)?.1.distance)
}

/// One IMLE sample: returns the minimum squared distance and accumulates its
/// gradient (through the argmin generation only) into `gen.params`. The
/// caller applies the optimizer.
pub fn imle_step(gen: &mut Generator, sample: &EncodedSample, m: usize, seed: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Invalid("m must be at least 1".into()));
    }
    let items = prepare_items(std::slice::from_ref(sample), gen.config.input_mode, None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    imle_item(gen, &items[0], m, &mut rng, 1.0)
}

/// IMLE training state: noise-free pretraining for `pretrain_epochs`, then
/// the m-sample objective for `epochs`.
#[derive(Clone, Debug)]
pub struct ImleTrainer {
    pub generator: Generator,
    pub opt: RmsProp,
    pub config: ImleConfig,
    pub rng: ChaCha8Rng,
    pub epoch: usize,
    pub steps: u64,
    /// Mean per-sample loss of each completed epoch.
    pub history: Vec<f64>,
}

impl ImleTrainer {
    pub fn new(model: ModelConfig, config: ImleConfig) -> Result<Self> {
        config.validate()?;
        let generator = Generator::new(model, config.seed)?;
        let opt = RmsProp::new(config.optimizer, &generator.params);
        let rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(2));
        Ok(Self { generator, opt, config, rng, epoch: 0, steps: 0, history: Vec::new() })
    }

    pub fn total_epochs(&self) -> usize {
        self.config.pretrain_epochs + self.config.epochs
    }

    pub fn in_pretraining(&self) -> bool {
        self.epoch < self.config.pretrain_epochs
    }

    /// Runs one epoch; pretraining epochs fit the mean squared error without
    /// the noise path.
    pub fn run_epoch(&mut self, data: &[EncodedSample]) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::Empty("training data"));
        }
        let items = prepare_items(data, self.generator.config.input_mode, None)?;
        let mut order: Vec<usize> = (0..items.len()).collect();
        order.shuffle(&mut self.rng);
        let pretrain = self.in_pretraining();
        let mut total = 0.0;
        for chunk in order.chunks(self.config.accumulate) {
            let k = chunk.len() as f64;
            for &i in chunk {
                let item = &items[i];
                let loss = if pretrain {
                    pretrain_item(&mut self.generator, item, 1.0 / k)?
                } else {
                    imle_item(&mut self.generator, item, self.config.m, &mut self.rng, 1.0 / k)?
                };
                if !loss.is_finite() {
                    return Err(Error::NonFiniteLoss { epoch: self.epoch, step: self.steps as usize });
                }
                total += loss;
            }
            self.opt.step(&mut self.generator.params)?;
            self.generator.params.zero_grad();
            self.steps += 1;
        }
        let mean = total / items.len() as f64;
        self.history.push(mean);
        self.epoch += 1;
        Ok(mean)
    }

    pub fn train(&mut self, data: &[EncodedSample], epochs: usize) -> Result<()> {
        for _ in 0..epochs {
            self.run_epoch(data)?;
        }
        Ok(())
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        Checkpoint {
            meta: CheckpointMeta {
                kind: ModelKind::Imle,
                model: self.generator.config.clone(),
                train: None,
                imle: Some(self.config.clone()),
                epoch: self.epoch,
                critic_steps: 0,
                generator_steps: self.steps,
                rng: RngState::capture(&self.rng),
                pad_to: None,
            },
            generator: self.generator.params.clone(),
            critic: None,
            generator_opt: self.opt.accumulators().to_vec(),
            critic_opt: None,
        }
    }

    pub fn from_checkpoint(ck: Checkpoint) -> Result<Self> {
        if ck.meta.kind != ModelKind::Imle {
            return Err(Error::Invalid("checkpoint is not resumable as IMLE: model kind".into()));
        }
        let config = ck.meta.imle.ok_or_else(|| Error::Invalid("checkpoint has no IMLE config".into()))?;
        config.validate()?;
        Ok(Self {
            generator: Generator::from_params(ck.meta.model, ck.generator)?,
            opt: RmsProp::from_accumulators(config.optimizer, ck.generator_opt),
            rng: ck.meta.rng.restore()?,
            config,
            epoch: ck.meta.epoch,
            steps: ck.meta.generator_steps,
            history: Vec::new(),
        })
    }
}

fn pretrain_item(gen: &mut Generator, item: &TrainItem, scale: f64) -> Result<f64> {
    let mut tape = Tape::new();
    let out = gen.forward_rows(&mut tape, &item.rows, &item.emotion_onehot, &item.speaker_onehot, None)?;
    let target = tape.leaf(Tensor::vector(item.target.clone()));
    let sq = tape.sum_sq_diff(out.lengths, target)?;
    let mse = tape.scale(sq, 1.0 / item.target.len() as f64);
    let value = tape.value(mse).item();
    tape.backward(mse, scale).accumulate(&tape, &mut gen.params);
    Ok(value)
}

/// Noise-free pretraining only: runs `config.pretrain_epochs` epochs.
pub fn imle_pretrain(data: &[EncodedSample], model: &ModelConfig, config: &ImleConfig) -> Result<Generator> {
    let mut t = ImleTrainer::new(model.clone(), config.clone())?;
    let n = config.pretrain_epochs;
    t.train(data, n)?;
    Ok(t.generator)
}

/// Pretraining followed by IMLE epochs; returns the generator and per-epoch losses.
pub fn train_imle(data: &[EncodedSample], model: &ModelConfig, config: &ImleConfig) -> Result<(Generator, Vec<f64>)> {
    let mut t = ImleTrainer::new(model.clone(), config.clone())?;
    let n = t.total_epochs();
    t.train(data, n)?;
    Ok((t.generator, t.history))
}
