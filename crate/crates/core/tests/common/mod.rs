#![allow(dead_code)]

use wordlen::corpus::{
    encode_all, fixture_vocabulary, relative_with_reference, synth_corpus, tokenize, EncodedSample, Emotion, InputMode,
    PosTable, SynthCell, SynthSpec,
};
use wordlen::fixtures::SENTENCES;
use wordlen::model::ModelConfig;

pub mod gradcheck;

pub fn tiny_model() -> ModelConfig {
    ModelConfig {
        text_embed_dim: 6,
        text_lstm_hidden: 5,
        text_latent_dim: 6,
        emotion_hidden_dim: 4,
        speaker_hidden_dim: 4,
        speaker_latent_dim: 3,
        noise_dim: 4,
        decoder_hidden: 8,
        decoder_layers: 1,
        critic_hidden: 6,
        critic_layers: 1,
        ..ModelConfig::default()
    }
}

/// Per-word means following a simple emotion-dependent pattern.
pub fn pattern(sentence_id: usize, emotion: Emotion) -> Vec<f64> {
    let n = tokenize(SENTENCES[sentence_id]).len();
    let e = emotion.index() as f64;
    (0..n).map(|i| 0.3 * ((i as f64 + 1.0) * (e + 1.0) * 0.7).sin()).collect()
}

pub fn cells(sentences: &[usize], emotions: &[Emotion]) -> Vec<SynthCell> {
    sentences
        .iter()
        .flat_map(|&s| emotions.iter().map(move |&e| SynthCell { sentence_id: s, emotion: e, means: pattern(s, e) }))
        .collect()
}

pub fn encode_spec(spec: &SynthSpec, seed: u64) -> Vec<EncodedSample> {
    let c = synth_corpus(spec, seed);
    let rels = relative_with_reference(&c.records, &c.reference).unwrap();
    encode_all(&rels, &fixture_vocabulary(), InputMode::Tokens, &PosTable::builtin()).unwrap()
}

pub fn dataset(sentences: &[usize], emotions: &[Emotion], per_cell: usize, noise: f64, seed: u64) -> Vec<EncodedSample> {
    encode_spec(&SynthSpec::new(cells(sentences, emotions), per_cell, noise), seed)
}
