//! Wasserstein GAN and IMLE training, plus binary checkpoints.

mod checkpoint;
mod imle;
mod wgan;

use serde::{Deserialize, Serialize};

use crate::corpus::EncodedSample;
use crate::error::{Error, Result};
use crate::model::Critic;
use crate::nn::RmsPropConfig;

pub use checkpoint::{decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint, Checkpoint, CheckpointMeta, ModelKind, RngState, CHECKPOINT_VERSION};
pub use imle::{imle_loss, imle_pretrain, imle_step, select_nearest, train_imle, ImleChoice, ImleTrainer};
pub use wgan::{generate_padded, train_wgan, EpochStats, StepInfo, StepKind, WganTrainer};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PaddingMode {
    /// Variable-length samples, gradients accumulated one sample at a time.
    #[default]
    None,
    /// Every sample zero-padded to the longest sequence in the dataset.
    Zero,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorSchedule {
    /// One generator update after every `n_critic` critic updates.
    #[default]
    PerCriticSteps,
    /// Generator updated on every step of one epoch out of `n_critic`.
    PerEpoch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub n_critic: usize,
    pub clip_bound: f64,
    pub optimizer: RmsPropConfig,
    /// Reconstruction loss joins every `recon_every`-th generator update; 0 disables it.
    pub recon_every: usize,
    pub lambda_recon: f64,
    pub lambda_emotion: f64,
    /// Samples whose gradients are summed into one optimizer step.
    pub accumulate: usize,
    pub seed: u64,
    pub padding_mode: PaddingMode,
    pub schedule: GeneratorSchedule,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 1000,
            n_critic: 5,
            clip_bound: 0.03,
            optimizer: RmsPropConfig::default(),
            recon_every: 5,
            lambda_recon: 1.0,
            lambda_emotion: 0.5,
            accumulate: 16,
            seed: 0,
            padding_mode: PaddingMode::None,
            schedule: GeneratorSchedule::PerCriticSteps,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.clip_bound > 0.0) {
            return Err(Error::Invalid("clip_bound must be positive".into()));
        }
        if self.n_critic == 0 || self.accumulate == 0 {
            return Err(Error::Invalid("n_critic and accumulate must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImleConfig {
    /// Noise draws per ground-truth sample.
    pub m: usize,
    pub pretrain_epochs: usize,
    pub epochs: usize,
    pub optimizer: RmsPropConfig,
    pub accumulate: usize,
    pub seed: u64,
}

impl Default for ImleConfig {
    fn default() -> Self {
        Self { m: 10, pretrain_epochs: 100, epochs: 900, optimizer: RmsPropConfig::default(), accumulate: 16, seed: 0 }
    }
}

impl ImleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.accumulate == 0 {
            return Err(Error::Invalid("m and accumulate must be at least 1".into()));
        }
        Ok(())
    }
}

/// Anything that scores a relative-length sequence.
pub trait SequenceScorer {
    fn score_sequence(&self, lengths: &[f64], condition: Option<&[f64]>) -> Result<f64>;
}

impl SequenceScorer for Critic {
    fn score_sequence(&self, lengths: &[f64], condition: Option<&[f64]>) -> Result<f64> {
        self.criticize(lengths, condition)
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// `-(mean D(real) - mean D(fake))`, the quantity the critic minimizes.
pub fn critic_loss_from_scores(real: &[f64], fake: &[f64]) -> Result<f64> {
    if real.is_empty() || fake.is_empty() {
        return Err(Error::Empty("critic_loss"));
    }
    Ok(-(mean(real) - mean(fake)))
}

pub fn critic_loss<S: SequenceScorer>(critic: &S, real: &[Vec<f64>], fake: &[Vec<f64>]) -> Result<f64> {
    let r = real.iter().map(|x| critic.score_sequence(x, None)).collect::<Result<Vec<_>>>()?;
    let f = fake.iter().map(|x| critic.score_sequence(x, None)).collect::<Result<Vec<_>>>()?;
    critic_loss_from_scores(&r, &f)
}

/// Mean of `-ln p[target]` over a batch of emotion distributions.
pub fn emotion_cross_entropy(probs: &[Vec<f64>], targets: &[usize]) -> Result<f64> {
    if probs.len() != targets.len() {
        return Err(Error::LengthMismatch { what: "emotion targets", left: probs.len(), right: targets.len() });
    }
    if probs.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = probs.iter().zip(targets).map(|(p, t)| -p[*t].max(f64::MIN_POSITIVE).ln()).sum();
    Ok(total / probs.len() as f64)
}

/// `-mean D(fake) + lambda_emotion * CE(emotion_probs, targets)`.
pub fn generator_loss<S: SequenceScorer>(
    critic: &S,
    fake: &[Vec<f64>],
    emotion_probs: &[Vec<f64>],
    emotion_targets: &[usize],
    cfg: &TrainConfig,
) -> Result<f64> {
    if fake.is_empty() {
        return Err(Error::Empty("generator_loss"));
    }
    let scores = fake.iter().map(|x| critic.score_sequence(x, None)).collect::<Result<Vec<_>>>()?;
    let ce = if cfg.lambda_emotion == 0.0 { 0.0 } else { emotion_cross_entropy(emotion_probs, emotion_targets)? };
    Ok(-mean(&scores) + cfg.lambda_emotion * ce)
}

/// Clamps every critic parameter into `[-bound, bound]`.
pub fn clip_weights(critic: &mut Critic, bound: f64) {
    critic.params.clamp(bound);
}

/// Mean squared error over timesteps.
pub fn reconstruction_loss(generated: &[f64], target: &[f64]) -> Result<f64> {
    if generated.len() != target.len() {
        return Err(Error::LengthMismatch { what: "reconstruction_loss", left: generated.len(), right: target.len() });
    }
    if generated.is_empty() {
        return Err(Error::Empty("reconstruction_loss"));
    }
    Ok(generated.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / generated.len() as f64)
}

/// Model input rows, conditioning and target for one training sample, after
/// optional zero padding.
#[derive(Clone, Debug)]
pub(crate) struct TrainItem {
    pub rows: Vec<Vec<f64>>,
    pub emotion_onehot: Vec<f64>,
    pub speaker_onehot: Vec<f64>,
    pub emotion: usize,
    pub target: Vec<f64>,
}

pub(crate) fn prepare_items(
    data: &[EncodedSample],
    mode: crate::corpus::InputMode,
    pad_to: Option<usize>,
) -> Result<Vec<TrainItem>> {
    data.iter()
        .map(|s| {
            let mut rows = s.inputs(mode)?.to_vec();
            let mut target = s.target.clone();
            if let Some(len) = pad_to {
                let width = rows.first().map_or(0, Vec::len);
                rows.resize(len, vec![0.0; width]);
                target.resize(len, 0.0);
            }
            Ok(TrainItem {
                rows,
                emotion_onehot: s.emotion_onehot.clone(),
                speaker_onehot: s.speaker_onehot.clone(),
                emotion: s.emotion.index(),
                target,
            })
        })
        .collect()
}
