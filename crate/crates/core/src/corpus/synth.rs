use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{tokenize, ClipRecord, Emotion, Intensity, WordAlignment};
use crate::fixtures::{NUM_SPEAKERS, SENTENCES};

/// Target relative lengths for one (sentence, emotion) cell.
#[derive(Clone, Debug)]
pub struct SynthCell {
    pub sentence_id: usize,
    pub emotion: Emotion,
    pub means: Vec<f64>,
}

/// Recipe for a synthetic alignment corpus.
///
/// Each clip's word durations are `reference * (1 + mean + offset + noise)`,
/// clamped to stay positive, where `offset` is the speaker offset (if any) plus
/// a random `±mode_offset` shift shared by all words of the clip (if set).
#[derive(Clone, Debug)]
pub struct SynthSpec {
    pub cells: Vec<SynthCell>,
    pub clips_per_cell: usize,
    pub noise: f64,
    pub speakers: usize,
    /// Additive relative-length offset per speaker.
    pub speaker_offsets: Option<Vec<f64>>,
    /// When set, each clip is shifted by `+m` or `-m` with equal probability.
    pub mode_offset: Option<f64>,
    /// Per-word neutral reference durations for each sentence (seconds).
    pub reference: Vec<Vec<f64>>,
    pub alpha_range: (f64, f64),
}

impl SynthSpec {
    /// Reference durations derived from word length in characters.
    pub fn default_reference() -> Vec<Vec<f64>> {
        SENTENCES
            .iter()
            .map(|s| tokenize(s).iter().map(|w| 0.12 + 0.045 * w.len() as f64).collect())
            .collect()
    }

    pub fn new(cells: Vec<SynthCell>, clips_per_cell: usize, noise: f64) -> Self {
        Self {
            cells,
            clips_per_cell,
            noise,
            speakers: NUM_SPEAKERS,
            speaker_offsets: None,
            mode_offset: None,
            reference: Self::default_reference(),
            alpha_range: (1.0, 1.0),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SynthCorpus {
    pub records: Vec<ClipRecord>,
    /// The exact references the durations were generated from.
    pub reference: Vec<Vec<f64>>,
}

pub fn synth_corpus(spec: &SynthSpec, seed: u64) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut records = Vec::with_capacity(spec.cells.len() * spec.clips_per_cell);
    for cell in &spec.cells {
        let words = tokenize(SENTENCES[cell.sentence_id]);
        let reference = &spec.reference[cell.sentence_id];
        for k in 0..spec.clips_per_cell {
            let speaker_id = rng.random_range(0..spec.speakers);
            let mut shift = spec.speaker_offsets.as_ref().map_or(0.0, |o| o[speaker_id]);
            if let Some(m) = spec.mode_offset {
                shift += if rng.random_bool(0.5) { m } else { -m };
            }
            let (lo, hi) = spec.alpha_range;
            let alpha = if hi > lo { rng.random_range(lo..hi) } else { lo };
            let mut t = 0.1;
            let aligned = words
                .iter()
                .zip(reference)
                .zip(&cell.means)
                .map(|((w, r), m)| {
                    let eps = if spec.noise > 0.0 { spec.noise * normal.sample(&mut rng) } else { 0.0 };
                    let d = (r * (1.0 + m + shift + eps)).max(1e-3);
                    let a = WordAlignment { word: w.clone(), start: t, end: t + d };
                    t += d;
                    a
                })
                .collect();
            records.push(ClipRecord {
                clip_id: format!("syn_s{}_{}_{}", cell.sentence_id, cell.emotion, k),
                speaker_id,
                sentence_id: cell.sentence_id,
                emotion: cell.emotion,
                intensity: Intensity::Unspecified,
                alpha,
                words: aligned,
            });
        }
    }
    SynthCorpus { records, reference: spec.reference.clone() }
}
