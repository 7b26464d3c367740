use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use wordlen::corpus::Emotion;
use wordlen::eval::FdMode;
use wordlen::model::ModelConfig;
use wordlen::ssml::DEFAULT_VOICE;
use wordlen::training::{ImleConfig, TrainConfig};

use crate::InputError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Alignment CSV, or a directory with `metadata.csv` and aligner JSON files.
    pub alignments: Option<PathBuf>,
    /// `sentence_id,word_index,pos_tag` CSV; the built-in tags are used when absent.
    pub pos: Option<PathBuf>,
    /// Prepared dataset; defaults to `<out>/dataset.csv`.
    pub dataset: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub fd_mode: FdMode,
    pub frame_rate: f64,
    /// Generated sequences per (sentence, emotion) cell.
    pub samples: usize,
}

impl Default for EvalSection {
    fn default() -> Self {
        Self { fd_mode: FdMode::Rms, frame_rate: 100.0, samples: 100 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub alpha_threshold: f64,
    /// Emotions used for training and evaluation; empty means all.
    pub emotions: Vec<Emotion>,
    pub voice: String,
    pub paths: Paths,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub imle: ImleConfig,
    pub eval: EvalSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            alpha_threshold: 0.667,
            emotions: Vec::new(),
            voice: DEFAULT_VOICE.to_string(),
            paths: Paths::default(),
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            imle: ImleConfig::default(),
            eval: EvalSection::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))
            .map_err(InputError)?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display())).map_err(|e| InputError(e).into())
    }

    /// Applies flag overrides; the run seed also seeds both trainers.
    pub fn apply(&mut self, seed: Option<u64>, out: Option<PathBuf>) {
        if let Some(s) = seed {
            self.seed = s;
        }
        if out.is_some() {
            self.paths.out = out;
        }
        self.train.seed = self.seed;
        self.imle.seed = self.seed;
    }

    pub fn out_dir(&self) -> PathBuf {
        self.paths.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn dataset_path(&self) -> PathBuf {
        self.paths.dataset.clone().unwrap_or_else(|| self.out_dir().join("dataset.csv"))
    }

    pub fn emotions(&self) -> Vec<Emotion> {
        if self.emotions.is_empty() {
            Emotion::ALL.to_vec()
        } else {
            self.emotions.clone()
        }
    }

    /// CRC32 of the canonical TOML rendering of the effective config.
    pub fn hash(&self) -> u32 {
        let text = toml::to_string(self).expect("config serializes");
        crc32fast::hash(text.as_bytes())
    }

    /// Comment line every output file starts with.
    pub fn header(&self) -> String {
        format!("# wordlen seed={} config={:08x}", self.seed, self.hash())
    }
}
