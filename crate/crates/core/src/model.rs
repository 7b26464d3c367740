//! Generator and critic networks.
//!
//! The generator encodes the word sequence (linear embedding, bi-directional
//! LSTM, linear projection to a 20-wide code per word), the emotion and the
//! speaker (two linear layers each, broadcast to every word), concatenates the
//! codes, adds a projected per-phrase noise vector, and decodes the fused
//! sequence with a stacked LSTM into one relative length per word. A linear
//! head on the final decoder state predicts the emotion.
//!
//! The critic reads a relative-length sequence with a stacked LSTM and reduces
//! the last hidden state to one unbounded score.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::corpus::{hot_index, EncodedSample, Emotion, InputMode, RelativeSequence};
use crate::error::{Error, Result};
use crate::fixtures::{NUM_SPEAKERS, UPOS_TAGS};
use crate::nn::{init_params, BiLstm, Linear, LstmCell, ParamSet, ParamSpec, Tape, Tensor, Var};

pub const NUM_EMOTIONS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub vocab_size: usize,
    pub text_embed_dim: usize,
    pub text_lstm_hidden: usize,
    pub text_latent_dim: usize,
    pub emotion_hidden_dim: usize,
    pub emotion_latent_dim: usize,
    pub speaker_hidden_dim: usize,
    pub speaker_latent_dim: usize,
    pub noise_dim: usize,
    pub noise_mean: f64,
    pub noise_variance: f64,
    pub decoder_hidden: usize,
    pub decoder_layers: usize,
    pub critic_hidden: usize,
    pub critic_layers: usize,
    pub use_speaker: bool,
    pub conditional_critic: bool,
    pub input_mode: InputMode,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            vocab_size: 52,
            text_embed_dim: 32,
            text_lstm_hidden: 32,
            text_latent_dim: 20,
            emotion_hidden_dim: 8,
            emotion_latent_dim: 3,
            speaker_hidden_dim: 16,
            speaker_latent_dim: 8,
            noise_dim: 8,
            noise_mean: 0.0,
            noise_variance: 0.7,
            decoder_hidden: 64,
            decoder_layers: 2,
            critic_hidden: 64,
            critic_layers: 2,
            use_speaker: true,
            conditional_critic: false,
            input_mode: InputMode::Tokens,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let dims = [
            ("vocab_size", self.vocab_size),
            ("text_embed_dim", self.text_embed_dim),
            ("text_lstm_hidden", self.text_lstm_hidden),
            ("text_latent_dim", self.text_latent_dim),
            ("emotion_hidden_dim", self.emotion_hidden_dim),
            ("emotion_latent_dim", self.emotion_latent_dim),
            ("speaker_hidden_dim", self.speaker_hidden_dim),
            ("speaker_latent_dim", self.speaker_latent_dim),
            ("noise_dim", self.noise_dim),
            ("decoder_hidden", self.decoder_hidden),
            ("decoder_layers", self.decoder_layers),
            ("critic_hidden", self.critic_hidden),
            ("critic_layers", self.critic_layers),
        ];
        if let Some((name, _)) = dims.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Invalid(format!("model config: {name} must be at least 1")));
        }
        if !(self.noise_variance > 0.0) || !self.noise_mean.is_finite() {
            return Err(Error::Invalid("model config: noise variance must be positive".into()));
        }
        Ok(())
    }

    /// Width of each input row: vocabulary size in token mode, tagset size in POS mode.
    pub fn input_dim(&self) -> usize {
        match self.input_mode {
            InputMode::Tokens => self.vocab_size,
            InputMode::Pos => UPOS_TAGS.len(),
        }
    }

    /// Width of the concatenated text, emotion and speaker codes.
    pub fn fused_dim(&self) -> usize {
        self.text_latent_dim + self.emotion_latent_dim + if self.use_speaker { self.speaker_latent_dim } else { 0 }
    }

    pub fn noise_spec(&self) -> NoiseSpec {
        NoiseSpec { mean: self.noise_mean, variance: self.noise_variance, width: self.noise_dim }
    }

    pub fn generator_specs(&self) -> Vec<ParamSpec> {
        let mut s = Linear::specs("text.embed", self.input_dim(), self.text_embed_dim);
        s.extend(BiLstm::specs("text.bilstm", self.text_embed_dim, self.text_lstm_hidden));
        s.extend(Linear::specs("text.proj", 2 * self.text_lstm_hidden, self.text_latent_dim));
        s.extend(Linear::specs("emotion.l1", NUM_EMOTIONS, self.emotion_hidden_dim));
        s.extend(Linear::specs("emotion.l2", self.emotion_hidden_dim, self.emotion_latent_dim));
        if self.use_speaker {
            s.extend(Linear::specs("speaker.l1", NUM_SPEAKERS, self.speaker_hidden_dim));
            s.extend(Linear::specs("speaker.l2", self.speaker_hidden_dim, self.speaker_latent_dim));
        }
        s.extend(Linear::specs("noise.proj", self.noise_dim, self.fused_dim()));
        for l in 0..self.decoder_layers {
            let input = if l == 0 { self.fused_dim() } else { self.decoder_hidden };
            s.extend(LstmCell::specs(&format!("decoder.lstm{l}"), input, self.decoder_hidden));
        }
        s.extend(Linear::specs("decoder.out", self.decoder_hidden, 1));
        s.extend(Linear::specs("emotion_head", self.decoder_hidden, NUM_EMOTIONS));
        s
    }

    pub fn critic_input_dim(&self) -> usize {
        1 + if self.conditional_critic { NUM_EMOTIONS } else { 0 }
    }

    pub fn critic_specs(&self) -> Vec<ParamSpec> {
        let mut s = Vec::new();
        for l in 0..self.critic_layers {
            let input = if l == 0 { self.critic_input_dim() } else { self.critic_hidden };
            s.extend(LstmCell::specs(&format!("critic.lstm{l}"), input, self.critic_hidden));
        }
        s.extend(Linear::specs("critic.fc1", self.critic_hidden, self.critic_hidden));
        s.extend(Linear::specs("critic.fc2", self.critic_hidden, 1));
        s
    }
}

/// Gaussian noise fed to the noise encoder, one vector per phrase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub mean: f64,
    pub variance: f64,
    pub width: usize,
}

impl NoiseSpec {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let normal = Normal::new(self.mean, self.variance.sqrt()).expect("positive variance");
        (0..self.width).map(|_| normal.sample(rng)).collect()
    }
}

/// Tape handles for one generator forward pass.
pub struct GeneratorOutput {
    /// Relative lengths as one `[T]` vector.
    pub lengths: Var,
    pub emotion_logits: Var,
    pub emotion_probs: Var,
}

#[derive(Clone, Debug)]
struct GeneratorLayers {
    text_embed: Linear,
    text_bilstm: BiLstm,
    text_proj: Linear,
    emotion: [Linear; 2],
    speaker: Option<[Linear; 2]>,
    noise: Linear,
    decoder: Vec<LstmCell>,
    out: Linear,
    emotion_head: Linear,
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub config: ModelConfig,
    pub params: ParamSet,
    layers: GeneratorLayers,
}

impl PartialEq for Generator {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config && self.params == other.params
    }
}

fn check_onehot(v: &[f64], width: usize, what: &str) -> Result<()> {
    if v.len() != width || hot_index(v).is_none() {
        return Err(Error::Invalid(format!("{what} is not a valid 1-hot vector of width {width}")));
    }
    Ok(())
}

impl Generator {
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let params = init_params(&config.generator_specs(), seed)?;
        Self::from_params(config, params)
    }

    /// Wraps an existing parameter set (e.g. loaded from a checkpoint).
    pub fn from_params(config: ModelConfig, params: ParamSet) -> Result<Self> {
        config.validate()?;
        for spec in config.generator_specs() {
            let i = params.find(&spec.name).ok_or_else(|| Error::Invalid(format!("missing parameter `{}`", spec.name)))?;
            if params.get(i).value.shape() != spec.shape.as_slice() {
                return Err(Error::Shape {
                    op: "generator",
                    detail: format!("`{}` is {:?}, expected {:?}", spec.name, params.get(i).value.shape(), spec.shape),
                });
            }
        }
        let layers = GeneratorLayers {
            text_embed: Linear::from_set(&params, "text.embed")?,
            text_bilstm: BiLstm::from_set(&params, "text.bilstm")?,
            text_proj: Linear::from_set(&params, "text.proj")?,
            emotion: [Linear::from_set(&params, "emotion.l1")?, Linear::from_set(&params, "emotion.l2")?],
            speaker: if config.use_speaker {
                Some([Linear::from_set(&params, "speaker.l1")?, Linear::from_set(&params, "speaker.l2")?])
            } else {
                None
            },
            noise: Linear::from_set(&params, "noise.proj")?,
            decoder: (0..config.decoder_layers)
                .map(|l| LstmCell::from_set(&params, &format!("decoder.lstm{l}")))
                .collect::<Result<_>>()?,
            out: Linear::from_set(&params, "decoder.out")?,
            emotion_head: Linear::from_set(&params, "emotion_head")?,
        };
        Ok(Self { config, params, layers })
    }

    /// One latent code of width `text_latent_dim` per input row.
    pub fn encode_text(&self, tape: &mut Tape, rows: &[Vec<f64>]) -> Result<Vec<Var>> {
        if rows.is_empty() {
            return Err(Error::Empty("encode_text"));
        }
        let width = self.config.input_dim();
        if let Some(r) = rows.iter().find(|r| r.len() != width) {
            return Err(Error::Shape { op: "encode_text", detail: format!("row width {} but input width is {}", r.len(), width) });
        }
        let embed = self.layers.text_embed.bind(tape, &self.params);
        let xs = rows
            .iter()
            .map(|r| {
                let x = tape.leaf(Tensor::vector(r.clone()));
                embed.forward(tape, x)
            })
            .collect::<Result<Vec<_>>>()?;
        let hs = self.layers.text_bilstm.forward(tape, &self.params, &xs)?;
        let proj = self.layers.text_proj.bind(tape, &self.params);
        hs.into_iter().map(|h| proj.forward(tape, h)).collect()
    }

    fn two_layer(&self, tape: &mut Tape, layers: &[Linear; 2], x: &[f64]) -> Result<Var> {
        let x = tape.leaf(Tensor::vector(x.to_vec()));
        let h = layers[0].forward(tape, &self.params, x)?;
        let h = tape.tanh(h);
        layers[1].forward(tape, &self.params, h)
    }

    pub fn encode_emotion(&self, tape: &mut Tape, onehot: &[f64]) -> Result<Var> {
        check_onehot(onehot, NUM_EMOTIONS, "emotion")?;
        self.two_layer(tape, &self.layers.emotion, onehot)
    }

    /// `None` when the model was built without speaker conditioning.
    pub fn encode_speaker(&self, tape: &mut Tape, onehot: &[f64]) -> Result<Option<Var>> {
        match &self.layers.speaker {
            None => Ok(None),
            Some(layers) => {
                check_onehot(onehot, NUM_SPEAKERS, "speaker")?;
                self.two_layer(tape, layers, onehot).map(Some)
            }
        }
    }

    /// Per word: `[text_t; emotion; speaker] + W_noise z + b_noise`. With
    /// `noise == None` the noise path is skipped entirely.
    pub fn assemble_latent(
        &self,
        tape: &mut Tape,
        text: &[Var],
        emotion: Var,
        speaker: Option<Var>,
        noise: Option<&[f64]>,
    ) -> Result<Vec<Var>> {
        let projected = match noise {
            None => None,
            Some(z) => {
                if z.len() != self.config.noise_dim {
                    return Err(Error::Shape {
                        op: "assemble_latent",
                        detail: format!("noise width {} but noise_dim is {}", z.len(), self.config.noise_dim),
                    });
                }
                let z = tape.leaf(Tensor::vector(z.to_vec()));
                Some(self.layers.noise.forward(tape, &self.params, z)?)
            }
        };
        let fused_dim = self.config.fused_dim();
        text.iter()
            .map(|&t| {
                let mut parts = vec![t, emotion];
                parts.extend(speaker);
                let cat = tape.concat(&parts)?;
                if tape.value(cat).len() != fused_dim {
                    return Err(Error::Shape {
                        op: "assemble_latent",
                        detail: format!("fused width {} but expected {}", tape.value(cat).len(), fused_dim),
                    });
                }
                match projected {
                    Some(p) => tape.add(cat, p),
                    None => Ok(cat),
                }
            })
            .collect()
    }

    pub fn decode(&self, tape: &mut Tape, fused: &[Var]) -> Result<GeneratorOutput> {
        if fused.is_empty() {
            return Err(Error::Empty("decode"));
        }
        let mut hs = fused.to_vec();
        for cell in &self.layers.decoder {
            hs = cell.run(tape, &self.params, &hs)?;
        }
        let out = self.layers.out.bind(tape, &self.params);
        let per_step = hs.iter().map(|&h| out.forward(tape, h)).collect::<Result<Vec<_>>>()?;
        let lengths = tape.concat(&per_step)?;
        let last = *hs.last().expect("non-empty");
        let emotion_logits = self.layers.emotion_head.forward(tape, &self.params, last)?;
        let emotion_probs = tape.softmax(emotion_logits)?;
        Ok(GeneratorOutput { lengths, emotion_logits, emotion_probs })
    }

    /// Full forward pass over raw input rows.
    pub fn forward_rows(
        &self,
        tape: &mut Tape,
        rows: &[Vec<f64>],
        emotion_onehot: &[f64],
        speaker_onehot: &[f64],
        noise: Option<&[f64]>,
    ) -> Result<GeneratorOutput> {
        let text = self.encode_text(tape, rows)?;
        let emo = self.encode_emotion(tape, emotion_onehot)?;
        let spk = self.encode_speaker(tape, speaker_onehot)?;
        let fused = self.assemble_latent(tape, &text, emo, spk, noise)?;
        self.decode(tape, &fused)
    }

    pub fn forward(&self, tape: &mut Tape, sample: &EncodedSample, noise: Option<&[f64]>) -> Result<GeneratorOutput> {
        let rows = sample.inputs(self.config.input_mode)?;
        self.forward_rows(tape, rows, &sample.emotion_onehot, &sample.speaker_onehot, noise)
    }

    /// Relative lengths and emotion distribution for one noise draw (or none).
    pub fn predict(&self, sample: &EncodedSample, noise: Option<&[f64]>) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut tape = Tape::new();
        let out = self.forward(&mut tape, sample, noise)?;
        Ok((tape.value(out.lengths).data().to_vec(), tape.value(out.emotion_probs).data().to_vec()))
    }

    /// Draws one noise vector from `seed` and generates a sequence.
    pub fn generate(&self, sample: &EncodedSample, seed: u64) -> Result<RelativeSequence> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.generate_with(sample, &mut rng)
    }

    pub fn generate_with<R: Rng>(&self, sample: &EncodedSample, rng: &mut R) -> Result<RelativeSequence> {
        let z = self.config.noise_spec().sample(rng);
        let (values, _) = self.predict(sample, Some(&z))?;
        Ok(RelativeSequence { sentence_id: sample.sentence_id, emotion: sample.emotion, speaker_id: sample.speaker_id, values })
    }
}

#[derive(Clone, Debug)]
pub struct Critic {
    pub config: ModelConfig,
    pub params: ParamSet,
    lstm: Vec<LstmCell>,
    fc1: Linear,
    fc2: Linear,
}

impl PartialEq for Critic {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config && self.params == other.params
    }
}

impl Critic {
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let params = init_params(&config.critic_specs(), seed)?;
        Self::from_params(config, params)
    }

    pub fn from_params(config: ModelConfig, params: ParamSet) -> Result<Self> {
        config.validate()?;
        for spec in config.critic_specs() {
            let i = params.find(&spec.name).ok_or_else(|| Error::Invalid(format!("missing parameter `{}`", spec.name)))?;
            if params.get(i).value.shape() != spec.shape.as_slice() {
                return Err(Error::Shape { op: "critic", detail: format!("`{}` has the wrong shape", spec.name) });
            }
        }
        let lstm = (0..config.critic_layers)
            .map(|l| LstmCell::from_set(&params, &format!("critic.lstm{l}")))
            .collect::<Result<_>>()?;
        let fc1 = Linear::from_set(&params, "critic.fc1")?;
        let fc2 = Linear::from_set(&params, "critic.fc2")?;
        Ok(Self { config, params, lstm, fc1, fc2 })
    }

    /// Scores a `[T]` vector of relative lengths. `condition` is the emotion
    /// 1-hot and is only read by a conditional critic.
    pub fn score(&self, tape: &mut Tape, lengths: Var, condition: Option<&[f64]>) -> Result<Var> {
        let t = tape.value(lengths).len();
        if t == 0 {
            return Err(Error::Empty("criticize"));
        }
        let cond = if self.config.conditional_critic {
            let c = condition.ok_or_else(|| Error::Invalid("conditional critic needs an emotion 1-hot".into()))?;
            check_onehot(c, NUM_EMOTIONS, "critic condition")?;
            Some(tape.leaf(Tensor::vector(c.to_vec())))
        } else {
            None
        };
        let mut xs = Vec::with_capacity(t);
        for i in 0..t {
            let x = tape.slice(lengths, i, 1)?;
            xs.push(match cond {
                Some(c) => tape.concat(&[x, c])?,
                None => x,
            });
        }
        for cell in &self.lstm {
            xs = cell.run(tape, &self.params, &xs)?;
        }
        let last = *xs.last().expect("non-empty");
        let h = self.fc1.forward(tape, &self.params, last)?;
        let h = tape.tanh(h);
        self.fc2.forward(tape, &self.params, h)
    }

    /// Forward-only score of a plain sequence.
    pub fn criticize(&self, lengths: &[f64], condition: Option<&[f64]>) -> Result<f64> {
        if lengths.is_empty() {
            return Err(Error::Empty("criticize"));
        }
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::vector(lengths.to_vec()));
        let s = self.score(&mut tape, x, condition)?;
        Ok(tape.value(s).item())
    }
}

/// Emotion whose probability is highest.
pub fn argmax_emotion(probs: &[f64]) -> Option<Emotion> {
    probs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .and_then(|(i, _)| Emotion::from_index(i))
}
