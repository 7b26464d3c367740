//! SSML rendering of relative word lengths as per-word prosody rates.

use std::fmt::Write as _;

use crate::corpus::Emotion;
use crate::error::{Error, Result};
use crate::fixtures::SENTENCES;

pub const MIN_RATE: u32 = 20;
pub const MAX_RATE: u32 = 400;
pub const DEFAULT_VOICE: &str = "en-US-JennyNeural";

/// Rate for one word, with whether the clamp to `[MIN_RATE, MAX_RATE]` kicked in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rate {
    pub percent: u32,
    pub clamped: bool,
}

/// `round(100 / (1 + r))`, clamped to `[20, 400]`. A word twice as long as
/// neutral (r = 1) plays at 50%.
pub fn relative_to_rate(r: f64) -> Result<Rate> {
    if !(r > -1.0) || !r.is_finite() {
        return Err(Error::Invalid(format!("relative length {r} must be finite and greater than -1")));
    }
    let raw = (100.0 / (1.0 + r)).round();
    let percent = raw.clamp(MIN_RATE as f64, MAX_RATE as f64) as u32;
    Ok(Rate { percent, clamped: raw < MIN_RATE as f64 || raw > MAX_RATE as f64 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SsmlWord {
    pub token: String,
    pub rate: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SsmlDocument {
    pub voice: String,
    pub words: Vec<SsmlWord>,
}

/// A word whose rate hit the clamp while building a document.
#[derive(Clone, Debug, PartialEq)]
pub struct ClampEvent {
    pub word_index: usize,
    pub token: String,
    pub relative: f64,
    pub rate: u32,
}

impl SsmlDocument {
    pub fn new(tokens: &[String], rates: &[u32], voice: &str) -> Result<Self> {
        if tokens.len() != rates.len() {
            return Err(Error::LengthMismatch { what: "ssml tokens and rates", left: tokens.len(), right: rates.len() });
        }
        if let Some(i) = rates.iter().position(|&r| r == 0) {
            return Err(Error::Invalid(format!("rate for word {i} must be at least 1%")));
        }
        let words = tokens.iter().zip(rates).map(|(t, &rate)| SsmlWord { token: t.clone(), rate }).collect();
        Ok(Self { voice: voice.to_string(), words })
    }

    /// Builds a document from relative lengths, reporting every clamped word.
    pub fn from_relative(tokens: &[String], relative: &[f64], voice: &str) -> Result<(Self, Vec<ClampEvent>)> {
        if tokens.len() != relative.len() {
            return Err(Error::LengthMismatch { what: "ssml tokens and lengths", left: tokens.len(), right: relative.len() });
        }
        let mut rates = Vec::with_capacity(relative.len());
        let mut clamps = Vec::new();
        for (i, (t, &r)) in tokens.iter().zip(relative).enumerate() {
            let rate = relative_to_rate(r)?;
            if rate.clamped {
                clamps.push(ClampEvent { word_index: i, token: t.clone(), relative: r, rate: rate.percent });
            }
            rates.push(rate.percent);
        }
        Ok((Self::new(tokens, &rates, voice)?, clamps))
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        s.push_str("<speak version=\"1.0\" xmlns=\"http://www.w3.org/2001/10/synthesis\" xml:lang=\"en-US\">\n");
        let _ = writeln!(s, "  <voice name=\"{}\">", escape(&self.voice));
        for w in &self.words {
            let _ = writeln!(s, "    <prosody rate=\"{}%\">{}</prosody>", w.rate, escape(&w.token));
        }
        s.push_str("  </voice>\n</speak>\n");
        s
    }
}

pub fn emit_ssml(tokens: &[String], rates: &[u32], voice: &str) -> Result<String> {
    Ok(SsmlDocument::new(tokens, rates, voice)?.render())
}

/// Escapes markup characters and replaces characters XML 1.0 cannot carry
/// with U+FFFD.
pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\t' | '\n' | '\r' => out.push(c),
            c if (c as u32) < 0x20 || c == '\u{FFFE}' || c == '\u{FFFF}' => out.push('\u{FFFD}'),
            c => out.push(c),
        }
    }
    out
}

/// Surface form of each word of a fixture sentence, one per aligned word.
pub fn sentence_words(sentence_id: usize) -> Result<Vec<String>> {
    SENTENCES
        .get(sentence_id)
        .map(|s| s.split_whitespace().map(str::to_string).collect())
        .ok_or_else(|| Error::Invalid(format!("sentence {sentence_id} out of range")))
}

/// `s{ID}_{emotion}_{k}.ssml`.
pub fn ssml_file_name(sentence_id: usize, emotion: Emotion, k: usize) -> String {
    format!("s{sentence_id}_{emotion}_{k}.ssml")
}
