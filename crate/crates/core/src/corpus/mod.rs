//! Alignment records, rater-agreement filtering, relative word lengths and
//! one-hot encoding of training samples.

mod io;
mod synth;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures::{NUM_SPEAKERS, POS_TAGS, SENTENCES, SENTENCE_CODES, UPOS_TAGS};

pub use io::{
    parse_alignments, parse_alignments_csv, parse_gentle_dir, read_dataset_csv, read_pos_table, write_alignments_csv,
    write_dataset_csv, Dataset, ALIGNMENT_HEADER, DATASET_EXTRA,
};
pub use synth::{synth_corpus, SynthCell, SynthCorpus, SynthSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emotion {
    Anger,
    Disgust,
    Fear,
    Happy,
    Neutral,
    Sad,
}

impl Emotion {
    pub const ALL: [Emotion; 6] =
        [Emotion::Anger, Emotion::Disgust, Emotion::Fear, Emotion::Happy, Emotion::Neutral, Emotion::Sad];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Emotion::Anger => "anger",
            Emotion::Disgust => "disgust",
            Emotion::Fear => "fear",
            Emotion::Happy => "happy",
            Emotion::Neutral => "neutral",
            Emotion::Sad => "sad",
        }
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Emotion {
    type Err = String;

    /// Accepts full names and CREMA-D codes (`ANG`, `DIS`, `FEA`, `HAP`, `NEU`, `SAD`).
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "anger" | "angry" | "ang" => Emotion::Anger,
            "disgust" | "dis" => Emotion::Disgust,
            "fear" | "fea" => Emotion::Fear,
            "happy" | "happiness" | "hap" => Emotion::Happy,
            "neutral" | "neu" => Emotion::Neutral,
            "sad" | "sadness" => Emotion::Sad,
            other => return Err(format!("unknown emotion `{other}`")),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Intensity {
    Low,
    Medium,
    High,
    Unspecified,
}

impl Intensity {
    pub const ALL: [Intensity; 4] = [Intensity::Low, Intensity::Medium, Intensity::High, Intensity::Unspecified];

    pub fn name(self) -> &'static str {
        match self {
            Intensity::Low => "low",
            Intensity::Medium => "medium",
            Intensity::High => "high",
            Intensity::Unspecified => "unspecified",
        }
    }
}

impl fmt::Display for Intensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Intensity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "low" | "lo" => Intensity::Low,
            "medium" | "md" => Intensity::Medium,
            "high" | "hi" => Intensity::High,
            "unspecified" | "xx" | "x" => Intensity::Unspecified,
            other => return Err(format!("unknown intensity `{other}`")),
        })
    }
}

/// Accepts `0..=90` or CREMA-D actor ids `1001..=1091`.
pub fn parse_speaker(s: &str) -> std::result::Result<usize, String> {
    let v: usize = s.trim().parse().map_err(|_| format!("`{s}` is not an integer"))?;
    match v {
        0..=90 => Ok(v),
        1001..=1091 => Ok(v - 1001),
        _ => Err(format!("speaker {v} out of range")),
    }
}

/// Accepts `0..=11` or a CREMA-D sentence code such as `IEO`.
pub fn parse_sentence_id(s: &str) -> std::result::Result<usize, String> {
    let t = s.trim();
    if let Ok(v) = t.parse::<usize>() {
        return if v < SENTENCES.len() { Ok(v) } else { Err(format!("sentence {v} out of range")) };
    }
    SENTENCE_CODES
        .iter()
        .position(|c| c.eq_ignore_ascii_case(t))
        .ok_or_else(|| format!("unknown sentence `{t}`"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordAlignment {
    pub word: String,
    pub start: f64,
    pub end: f64,
}

impl WordAlignment {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClipRecord {
    pub clip_id: String,
    pub speaker_id: usize,
    pub sentence_id: usize,
    pub emotion: Emotion,
    pub intensity: Intensity,
    pub alpha: f64,
    pub words: Vec<WordAlignment>,
}

impl ClipRecord {
    pub fn durations(&self) -> Vec<f64> {
        self.words.iter().map(WordAlignment::duration).collect()
    }

    /// Checks timing, id ranges and that the words spell the sentence.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Error::InvalidClip { clip_id: self.clip_id.clone(), msg };
        if self.speaker_id >= NUM_SPEAKERS {
            return Err(bad(format!("speaker {} out of range", self.speaker_id)));
        }
        if self.sentence_id >= SENTENCES.len() {
            return Err(bad(format!("sentence {} out of range", self.sentence_id)));
        }
        if !(-1.0..=1.0).contains(&self.alpha) {
            return Err(bad(format!("alpha {} outside [-1, 1]", self.alpha)));
        }
        if self.words.is_empty() {
            return Err(bad("no words".into()));
        }
        let expected = tokenize(SENTENCES[self.sentence_id]);
        let got: Vec<String> = self.words.iter().map(|w| normalize_token(&w.word)).collect();
        if expected != got {
            return Err(bad(format!("words {:?} do not match sentence {:?}", got, expected)));
        }
        let mut prev_end = f64::NEG_INFINITY;
        for (i, w) in self.words.iter().enumerate() {
            if !(w.start.is_finite() && w.end.is_finite()) || w.start < 0.0 {
                return Err(bad(format!("word {i} has invalid timestamps")));
            }
            if w.end <= w.start {
                return Err(bad(format!("word {i} `{}` ends ({}) before it starts ({})", w.word, w.end, w.start)));
            }
            if w.start < prev_end {
                return Err(bad(format!("word {i} `{}` overlaps the previous word", w.word)));
            }
            prev_end = w.end;
        }
        Ok(())
    }
}

/// Per-word durations relative to a neutral reference: `r = (d - d_ref) / d_ref`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativeSequence {
    pub sentence_id: usize,
    pub emotion: Emotion,
    pub speaker_id: usize,
    pub values: Vec<f64>,
}

impl RelativeSequence {
    /// Absolute durations implied by `values` against `reference`.
    pub fn durations(&self, reference: &[f64]) -> Result<Vec<f64>> {
        if reference.len() != self.values.len() {
            return Err(Error::LengthMismatch { what: "durations", left: self.values.len(), right: reference.len() });
        }
        Ok(self.values.iter().zip(reference).map(|(r, d)| d * (1.0 + r)).collect())
    }
}

/// Lowercases, trims surrounding whitespace and strips terminal punctuation.
/// Internal apostrophes are kept.
pub fn normalize_token(word: &str) -> String {
    let lower = word.trim().to_lowercase().replace('\u{2019}', "'");
    lower
        .trim_matches(|c: char| !(c.is_alphanumeric() || c == '\''))
        .trim_matches('\'')
        .to_string()
}

/// Word-level tokenizer: whitespace split, lowercase, contractions kept whole.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(normalize_token).filter(|t| !t.is_empty()).collect()
}

const CLITICS: [&str; 7] = ["n't", "'s", "'ve", "'ll", "'m", "'re", "'d"];

/// Sub-word tokenizer that splits English clitics off their host word
/// (`don't` -> `do`, `n't`; `we'll` -> `we`, `'ll`). `o'clock` stays whole.
pub fn tokenize_clitics(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for w in tokenize(text) {
        match CLITICS.iter().find(|c| w.len() > c.len() && w.ends_with(*c)) {
            Some(c) => {
                out.push(w[..w.len() - c.len()].to_string());
                out.push(c.to_string());
            }
            None => out.push(w),
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tokenizer {
    #[default]
    Words,
    Clitics,
}

impl Tokenizer {
    pub fn tokenize(self, text: &str) -> Vec<String> {
        match self {
            Tokenizer::Words => tokenize(text),
            Tokenizer::Clitics => tokenize_clitics(text),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, i: usize) -> Option<&str> {
        self.tokens.get(i).map(String::as_str)
    }
}

/// Builds a vocabulary in first-occurrence order with the word-level tokenizer.
pub fn build_vocabulary<S: AsRef<str>>(sentences: &[S]) -> Vocabulary {
    build_vocabulary_with(sentences, Tokenizer::Words)
}

pub fn build_vocabulary_with<S: AsRef<str>>(sentences: &[S], tokenizer: Tokenizer) -> Vocabulary {
    let mut tokens = Vec::new();
    let mut index = HashMap::new();
    for s in sentences {
        for t in tokenizer.tokenize(s.as_ref()) {
            if !index.contains_key(&t) {
                index.insert(t.clone(), tokens.len());
                tokens.push(t);
            }
        }
    }
    Vocabulary { tokens, index }
}

/// The vocabulary of the twelve fixture sentences.
pub fn fixture_vocabulary() -> Vocabulary {
    build_vocabulary(&SENTENCES)
}

/// Keeps records with `alpha >= threshold`, preserving order.
pub fn filter_by_alpha(records: &[ClipRecord], threshold: f64) -> Vec<ClipRecord> {
    records.iter().filter(|r| r.alpha >= threshold).cloned().collect()
}

fn mean_durations<'a>(clips: impl Iterator<Item = &'a ClipRecord>) -> Option<Result<Vec<f64>>> {
    let mut sum: Option<Vec<f64>> = None;
    let mut n = 0usize;
    for c in clips {
        let d = c.durations();
        match &mut sum {
            None => sum = Some(d),
            Some(s) => {
                if s.len() != d.len() {
                    return Some(Err(Error::InvalidClip {
                        clip_id: c.clip_id.clone(),
                        msg: format!("{} words, other neutral clips have {}", d.len(), s.len()),
                    }));
                }
                s.iter_mut().zip(d).for_each(|(a, b)| *a += b);
            }
        }
        n += 1;
    }
    sum.map(|s| Ok(s.into_iter().map(|v| v / n as f64).collect()))
}

/// Per-word mean duration over the speaker's neutral clips of a sentence,
/// falling back to the mean over all speakers' neutral clips of that sentence.
pub fn neutral_reference(records: &[ClipRecord], sentence_id: usize, speaker_id: usize) -> Result<Vec<f64>> {
    let neutral = |r: &&ClipRecord| r.sentence_id == sentence_id && r.emotion == Emotion::Neutral;
    if let Some(m) = mean_durations(records.iter().filter(neutral).filter(|r| r.speaker_id == speaker_id)) {
        return m;
    }
    mean_durations(records.iter().filter(neutral)).unwrap_or(Err(Error::NoNeutralReference(sentence_id)))
}

pub fn compute_relative(clip: &ClipRecord, reference: &[f64]) -> Result<RelativeSequence> {
    if clip.words.len() != reference.len() {
        return Err(Error::LengthMismatch { what: "compute_relative", left: clip.words.len(), right: reference.len() });
    }
    if let Some(i) = reference.iter().position(|d| !(*d > 0.0)) {
        return Err(Error::Invalid(format!("reference duration {i} is not positive")));
    }
    let values = clip.words.iter().zip(reference).map(|(w, r)| (w.duration() - r) / r).collect();
    Ok(RelativeSequence { sentence_id: clip.sentence_id, emotion: clip.emotion, speaker_id: clip.speaker_id, values })
}

/// Relative sequences for every clip, each against its speaker's neutral reference.
pub fn relative_dataset(records: &[ClipRecord]) -> Result<Vec<RelativeSequence>> {
    let mut cache: std::collections::HashMap<(usize, usize), Vec<f64>> = std::collections::HashMap::new();
    records
        .iter()
        .map(|r| {
            let key = (r.sentence_id, r.speaker_id);
            if !cache.contains_key(&key) {
                cache.insert(key, neutral_reference(records, r.sentence_id, r.speaker_id)?);
            }
            compute_relative(r, &cache[&key])
        })
        .collect()
}

/// Relative sequences against fixed per-sentence references.
pub fn relative_with_reference(records: &[ClipRecord], reference: &[Vec<f64>]) -> Result<Vec<RelativeSequence>> {
    records
        .iter()
        .map(|r| {
            let refs = reference.get(r.sentence_id).ok_or(Error::NoNeutralReference(r.sentence_id))?;
            compute_relative(r, refs)
        })
        .collect()
}

pub fn encode_all(rels: &[RelativeSequence], vocab: &Vocabulary, mode: InputMode, pos: &PosTable) -> Result<Vec<EncodedSample>> {
    rels.iter().map(|r| encode_sample(r, vocab, mode, pos)).collect()
}

/// Universal POS tags per (sentence, word).
#[derive(Clone, Debug, PartialEq)]
pub struct PosTable {
    tags: Vec<Vec<String>>,
}

impl PosTable {
    pub fn builtin() -> Self {
        Self { tags: POS_TAGS.iter().map(|s| s.iter().map(|t| t.to_string()).collect()).collect() }
    }

    pub fn from_rows(rows: Vec<(usize, usize, String)>) -> Result<Self> {
        let mut tags: Vec<Vec<Option<String>>> = vec![Vec::new(); SENTENCES.len()];
        for (s, w, tag) in rows {
            if s >= SENTENCES.len() {
                return Err(Error::Invalid(format!("POS row for unknown sentence {s}")));
            }
            if tags[s].len() <= w {
                tags[s].resize(w + 1, None);
            }
            tags[s][w] = Some(tag);
        }
        let tags = tags
            .into_iter()
            .enumerate()
            .map(|(s, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(w, t)| t.ok_or_else(|| Error::Invalid(format!("missing POS tag for sentence {s} word {w}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { tags })
    }

    pub fn tags(&self, sentence_id: usize) -> Option<&[String]> {
        self.tags.get(sentence_id).map(Vec::as_slice)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputMode {
    #[default]
    Tokens,
    Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EncodedSample {
    pub sentence_id: usize,
    pub emotion: Emotion,
    pub speaker_id: usize,
    pub tokens: Vec<Vec<f64>>,
    pub pos_tags: Option<Vec<Vec<f64>>>,
    pub emotion_onehot: Vec<f64>,
    pub speaker_onehot: Vec<f64>,
    pub target: Vec<f64>,
}

pub fn one_hot(index: usize, width: usize) -> Vec<f64> {
    let mut v = vec![0.0; width];
    v[index] = 1.0;
    v
}

/// Index of the hot entry, or `None` if `v` is not a valid 1-hot vector.
pub fn hot_index(v: &[f64]) -> Option<usize> {
    let mut found = None;
    for (i, x) in v.iter().enumerate() {
        if *x == 1.0 && found.is_none() {
            found = Some(i);
        } else if *x != 0.0 {
            return None;
        }
    }
    found
}

impl EncodedSample {
    pub fn len(&self) -> usize {
        self.target.len()
    }

    pub fn is_empty(&self) -> bool {
        self.target.is_empty()
    }

    /// Rows the model reads for the given input mode.
    pub fn inputs(&self, mode: InputMode) -> Result<&[Vec<f64>]> {
        match mode {
            InputMode::Tokens => Ok(&self.tokens),
            InputMode::Pos => {
                self.pos_tags.as_deref().ok_or_else(|| Error::Invalid("sample was encoded without POS tags".into()))
            }
        }
    }

    pub fn decode_tokens(&self, vocab: &Vocabulary) -> Result<Vec<String>> {
        self.tokens
            .iter()
            .map(|row| {
                hot_index(row)
                    .and_then(|i| vocab.token(i))
                    .map(str::to_string)
                    .ok_or_else(|| Error::Invalid("row is not a 1-hot vector of this vocabulary".into()))
            })
            .collect()
    }
}

/// Encodes a relative sequence for the model. In POS mode the tag rows are
/// filled from `pos` in addition to the token rows.
pub fn encode_sample(rel: &RelativeSequence, vocab: &Vocabulary, mode: InputMode, pos: &PosTable) -> Result<EncodedSample> {
    let words = SENTENCES
        .get(rel.sentence_id)
        .map(|s| tokenize(s))
        .ok_or_else(|| Error::Invalid(format!("sentence {} out of range", rel.sentence_id)))?;
    if words.len() != rel.values.len() {
        return Err(Error::LengthMismatch { what: "encode_sample", left: words.len(), right: rel.values.len() });
    }
    if rel.speaker_id >= NUM_SPEAKERS {
        return Err(Error::Invalid(format!("speaker {} out of range", rel.speaker_id)));
    }
    let tokens = words
        .iter()
        .map(|w| vocab.get(w).map(|i| one_hot(i, vocab.len())).ok_or_else(|| Error::OutOfVocabulary(w.clone())))
        .collect::<Result<Vec<_>>>()?;
    let pos_tags = match mode {
        InputMode::Tokens => None,
        InputMode::Pos => {
            let tags = pos
                .tags(rel.sentence_id)
                .ok_or_else(|| Error::Invalid(format!("no POS tags for sentence {}", rel.sentence_id)))?;
            if tags.len() != words.len() {
                return Err(Error::LengthMismatch { what: "POS tags", left: tags.len(), right: words.len() });
            }
            Some(
                tags.iter()
                    .map(|t| {
                        UPOS_TAGS
                            .iter()
                            .position(|u| u == t)
                            .map(|i| one_hot(i, UPOS_TAGS.len()))
                            .ok_or_else(|| Error::Invalid(format!("unknown POS tag `{t}`")))
                    })
                    .collect::<Result<Vec<_>>>()?,
            )
        }
    };
    Ok(EncodedSample {
        sentence_id: rel.sentence_id,
        emotion: rel.emotion,
        speaker_id: rel.speaker_id,
        tokens,
        pos_tags,
        emotion_onehot: one_hot(rel.emotion.index(), Emotion::ALL.len()),
        speaker_onehot: one_hot(rel.speaker_id, NUM_SPEAKERS),
        target: rel.values.clone(),
    })
}
