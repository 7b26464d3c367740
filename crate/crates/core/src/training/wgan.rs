use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::checkpoint::{Checkpoint, CheckpointMeta, ModelKind, RngState};
use super::{prepare_items, GeneratorSchedule, PaddingMode, TrainConfig, TrainItem};
use crate::corpus::{EncodedSample, RelativeSequence};
use crate::error::{Error, Result};
use crate::model::{Critic, Generator, ModelConfig};
use crate::nn::{RmsProp, Tape, Tensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Critic,
    Generator,
}

/// Reported to the training hook after every optimizer step.
#[derive(Clone, Copy, Debug)]
pub struct StepInfo {
    pub epoch: usize,
    pub step: u64,
    pub kind: StepKind,
    pub critic_max_abs: f64,
}

/// Per-epoch loss record.
#[derive(Clone, Debug, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean over critic steps of `mean D(real) - mean D(fake)`.
    pub wasserstein: f64,
    pub critic_loss: f64,
    /// Mean generator loss over the epoch's generator steps, if any.
    pub generator_loss: Option<f64>,
    /// Mean reconstruction MSE over the epoch's reconstruction steps, if any.
    pub recon_loss: Option<f64>,
}

/// Full WGAN training state. Everything needed to resume bit-exactly lives here.
#[derive(Clone, Debug)]
pub struct WganTrainer {
    pub generator: Generator,
    pub critic: Critic,
    pub gen_opt: RmsProp,
    pub critic_opt: RmsProp,
    pub config: TrainConfig,
    pub rng: ChaCha8Rng,
    pub epoch: usize,
    pub critic_steps: u64,
    pub generator_steps: u64,
    /// Length every sample is padded to in [`PaddingMode::Zero`].
    pub pad_to: Option<usize>,
    pub history: Vec<EpochStats>,
}

fn mean_or_none(sum: f64, n: usize) -> Option<f64> {
    (n > 0).then(|| sum / n as f64)
}

impl WganTrainer {
    pub fn new(model: ModelConfig, config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let generator = Generator::new(model.clone(), config.seed)?;
        let mut critic = Critic::new(model, config.seed.wrapping_add(1))?;
        critic.params.clamp(config.clip_bound);
        let gen_opt = RmsProp::new(config.optimizer, &generator.params);
        let critic_opt = RmsProp::new(config.optimizer, &critic.params);
        let rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(2));
        Ok(Self {
            generator,
            critic,
            gen_opt,
            critic_opt,
            config,
            rng,
            epoch: 0,
            critic_steps: 0,
            generator_steps: 0,
            pad_to: None,
            history: Vec::new(),
        })
    }

    fn pad_len(&mut self, data: &[EncodedSample]) -> Option<usize> {
        match self.config.padding_mode {
            PaddingMode::None => None,
            PaddingMode::Zero => {
                let len = *self.pad_to.get_or_insert_with(|| data.iter().map(EncodedSample::len).max().unwrap_or(1));
                Some(len)
            }
        }
    }

    fn generator_due(&self) -> bool {
        match self.config.schedule {
            GeneratorSchedule::PerCriticSteps => self.critic_steps % self.config.n_critic as u64 == 0,
            GeneratorSchedule::PerEpoch => self.epoch % self.config.n_critic == self.config.n_critic - 1,
        }
    }

    /// Trains for `epochs` more epochs. `hook` runs after every optimizer step.
    pub fn train(&mut self, data: &[EncodedSample], epochs: usize, hook: &mut dyn FnMut(&StepInfo)) -> Result<()> {
        for _ in 0..epochs {
            self.run_epoch(data, hook)?;
        }
        Ok(())
    }

    pub fn run_epoch(&mut self, data: &[EncodedSample], hook: &mut dyn FnMut(&StepInfo)) -> Result<EpochStats> {
        if data.is_empty() {
            return Err(Error::Empty("training data"));
        }
        let pad = self.pad_len(data);
        let items = prepare_items(data, self.generator.config.input_mode, pad)?;
        let mut order: Vec<usize> = (0..items.len()).collect();
        order.shuffle(&mut self.rng);

        let (mut w_sum, mut c_sum, mut n_critic) = (0.0, 0.0, 0usize);
        let (mut g_sum, mut n_gen, mut r_sum, mut n_recon) = (0.0, 0usize, 0.0, 0usize);
        for chunk in order.chunks(self.config.accumulate) {
            let batch: Vec<&TrainItem> = chunk.iter().map(|&i| &items[i]).collect();
            let w = self.critic_step(&batch)?;
            if !w.is_finite() {
                return Err(Error::NonFiniteLoss { epoch: self.epoch, step: self.critic_steps as usize });
            }
            w_sum += w;
            c_sum -= w;
            n_critic += 1;
            hook(&StepInfo {
                epoch: self.epoch,
                step: self.critic_steps,
                kind: StepKind::Critic,
                critic_max_abs: self.critic.params.max_abs(),
            });

            if self.generator_due() {
                let (g, recon) = self.generator_step(&batch)?;
                if !g.is_finite() {
                    return Err(Error::NonFiniteLoss { epoch: self.epoch, step: self.critic_steps as usize });
                }
                g_sum += g;
                n_gen += 1;
                if let Some(r) = recon {
                    r_sum += r;
                    n_recon += 1;
                }
                hook(&StepInfo {
                    epoch: self.epoch,
                    step: self.critic_steps,
                    kind: StepKind::Generator,
                    critic_max_abs: self.critic.params.max_abs(),
                });
            }
        }
        let stats = EpochStats {
            epoch: self.epoch,
            wasserstein: w_sum / n_critic as f64,
            critic_loss: c_sum / n_critic as f64,
            generator_loss: mean_or_none(g_sum, n_gen),
            recon_loss: mean_or_none(r_sum, n_recon),
        };
        self.history.push(stats.clone());
        self.epoch += 1;
        Ok(stats)
    }

    /// One critic update over `batch`; returns `mean D(real) - mean D(fake)`.
    fn critic_step(&mut self, batch: &[&TrainItem]) -> Result<f64> {
        let k = batch.len() as f64;
        let noise = self.generator.config.noise_spec();
        let conditional = self.critic.config.conditional_critic;
        let mut estimate = 0.0;
        for item in batch {
            let z = noise.sample(&mut self.rng);
            let fake = {
                let mut tape = Tape::new();
                let out = self.generator.forward_rows(&mut tape, &item.rows, &item.emotion_onehot, &item.speaker_onehot, Some(&z))?;
                tape.value(out.lengths).clone()
            };
            let cond = conditional.then_some(item.emotion_onehot.as_slice());
            let mut tape = Tape::new();
            let real = tape.leaf(Tensor::vector(item.target.clone()));
            let fake = tape.leaf(fake);
            let dr = self.critic.score(&mut tape, real, cond)?;
            let df = self.critic.score(&mut tape, fake, cond)?;
            let diff = tape.sub(dr, df)?;
            estimate += tape.value(diff).item();
            // minimize -(D(real) - D(fake)), averaged over the batch
            let grads = tape.backward(diff, -1.0 / k);
            grads.accumulate(&tape, &mut self.critic.params);
        }
        self.critic_opt.step(&mut self.critic.params)?;
        self.critic.params.zero_grad();
        self.critic.params.clamp(self.config.clip_bound);
        self.critic_steps += 1;
        Ok(estimate / k)
    }

    /// One generator update over `batch`; returns the mean loss and, on
    /// reconstruction steps, the mean reconstruction MSE.
    fn generator_step(&mut self, batch: &[&TrainItem]) -> Result<(f64, Option<f64>)> {
        self.generator_steps += 1;
        let cfg = &self.config;
        let with_recon = cfg.recon_every > 0 && self.generator_steps % cfg.recon_every as u64 == 0;
        let k = batch.len() as f64;
        let noise = self.generator.config.noise_spec();
        let conditional = self.critic.config.conditional_critic;
        let (mut total, mut recon_total) = (0.0, 0.0);
        for item in batch {
            let z = noise.sample(&mut self.rng);
            let mut tape = Tape::new();
            let out = self.generator.forward_rows(&mut tape, &item.rows, &item.emotion_onehot, &item.speaker_onehot, Some(&z))?;
            let cond = conditional.then_some(item.emotion_onehot.as_slice());
            let score = self.critic.score(&mut tape, out.lengths, cond)?;
            let mut loss = tape.scale(score, -1.0);
            if cfg.lambda_emotion != 0.0 {
                let ce = tape.cross_entropy(out.emotion_logits, item.emotion)?;
                let ce = tape.scale(ce, cfg.lambda_emotion);
                loss = tape.add(loss, ce)?;
            }
            if with_recon {
                let target = tape.leaf(Tensor::vector(item.target.clone()));
                let sq = tape.sum_sq_diff(out.lengths, target)?;
                let mse = tape.scale(sq, 1.0 / item.target.len() as f64);
                recon_total += tape.value(mse).item();
                let weighted = tape.scale(mse, cfg.lambda_recon);
                loss = tape.add(loss, weighted)?;
            }
            total += tape.value(loss).item();
            let grads = tape.backward(loss, 1.0 / k);
            grads.accumulate(&tape, &mut self.generator.params);
        }
        self.gen_opt.step(&mut self.generator.params)?;
        self.generator.params.zero_grad();
        Ok((total / k, with_recon.then(|| recon_total / k)))
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        Checkpoint {
            meta: CheckpointMeta {
                kind: ModelKind::Gan,
                model: self.generator.config.clone(),
                train: Some(self.config.clone()),
                imle: None,
                epoch: self.epoch,
                critic_steps: self.critic_steps,
                generator_steps: self.generator_steps,
                rng: RngState::capture(&self.rng),
                pad_to: self.pad_to,
            },
            generator: self.generator.params.clone(),
            critic: Some(self.critic.params.clone()),
            generator_opt: self.gen_opt.accumulators().to_vec(),
            critic_opt: Some(self.critic_opt.accumulators().to_vec()),
        }
    }

    pub fn from_checkpoint(ck: Checkpoint) -> Result<Self> {
        let bad = |m: &str| Error::Invalid(format!("checkpoint is not resumable as a GAN: {m}"));
        if ck.meta.kind != ModelKind::Gan {
            return Err(bad("model kind"));
        }
        let config = ck.meta.train.ok_or_else(|| bad("missing training config"))?;
        config.validate()?;
        let (Some(critic), Some(critic_acc)) = (ck.critic, ck.critic_opt) else {
            return Err(bad("missing critic"));
        };
        Ok(Self {
            generator: Generator::from_params(ck.meta.model.clone(), ck.generator)?,
            critic: Critic::from_params(ck.meta.model, critic)?,
            gen_opt: RmsProp::from_accumulators(config.optimizer, ck.generator_opt),
            critic_opt: RmsProp::from_accumulators(config.optimizer, critic_acc),
            rng: ck.meta.rng.restore()?,
            config,
            epoch: ck.meta.epoch,
            critic_steps: ck.meta.critic_steps,
            generator_steps: ck.meta.generator_steps,
            pad_to: ck.meta.pad_to,
            history: Vec::new(),
        })
    }

    /// Generates one sequence, applying the same padding the model was trained with.
    pub fn generate(&self, sample: &EncodedSample, rng: &mut ChaCha8Rng) -> Result<RelativeSequence> {
        generate_padded(&self.generator, sample, self.pad_to, rng)
    }
}

/// Generation for a model trained with zero padding: the input is padded to
/// `pad_to` rows and the output truncated back to the sentence length.
pub fn generate_padded(
    generator: &Generator,
    sample: &EncodedSample,
    pad_to: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> Result<RelativeSequence> {
    let Some(len) = pad_to else {
        return generator.generate_with(sample, rng);
    };
    let items = prepare_items(std::slice::from_ref(sample), generator.config.input_mode, Some(len.max(sample.len())))?;
    let z = generator.config.noise_spec().sample(rng);
    let mut tape = Tape::new();
    let it = &items[0];
    let out = generator.forward_rows(&mut tape, &it.rows, &it.emotion_onehot, &it.speaker_onehot, Some(&z))?;
    let values = tape.value(out.lengths).data()[..sample.len()].to_vec();
    Ok(RelativeSequence { sentence_id: sample.sentence_id, emotion: sample.emotion, speaker_id: sample.speaker_id, values })
}

/// Trains a fresh generator/critic pair for `train.epochs` epochs.
pub fn train_wgan(
    data: &[EncodedSample],
    model: &ModelConfig,
    train: &TrainConfig,
) -> Result<(Generator, Critic, Vec<EpochStats>)> {
    let mut t = WganTrainer::new(model.clone(), train.clone())?;
    t.train(data, train.epochs, &mut |_| {})?;
    Ok((t.generator, t.critic, t.history))
}
