use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;

use super::{
    parse_sentence_id, parse_speaker, relative_dataset, ClipRecord, Emotion, Intensity, PosTable, RelativeSequence,
    WordAlignment,
};
use crate::fixtures::SENTENCES;
use crate::error::{Error, Result};

pub const ALIGNMENT_HEADER: [&str; 10] =
    ["clip_id", "speaker_id", "sentence_id", "emotion", "intensity", "alpha", "word_index", "word", "start", "end"];

const METADATA_HEADER: [&str; 6] = ["clip_id", "speaker_id", "sentence_id", "emotion", "intensity", "alpha"];

/// Reads either the canonical alignment CSV (a file) or a directory holding a
/// `metadata.csv` sidecar and one `<clip_id>.json` aligner output per clip.
pub fn parse_alignments(path: &Path) -> Result<Vec<ClipRecord>> {
    if path.is_dir() {
        parse_gentle_dir(path)
    } else {
        parse_alignments_csv(File::open(path)?)
    }
}

fn field<'a>(rec: &'a csv::StringRecord, i: usize, line: usize) -> Result<&'a str> {
    rec.get(i).ok_or_else(|| Error::Parse { line, field: ALIGNMENT_HEADER[i].into(), msg: "missing".into() })
}

fn parse_f64(s: &str, line: usize, name: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse { line, field: name.into(), msg: format!("`{s}` is not a number") })
}

fn parse_with<T>(s: &str, line: usize, name: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> Result<T> {
    f(s).map_err(|msg| Error::Parse { line, field: name.into(), msg })
}

struct Meta {
    speaker_id: usize,
    sentence_id: usize,
    emotion: Emotion,
    intensity: Intensity,
    alpha: f64,
}

fn parse_meta(rec: &csv::StringRecord, line: usize, offset: usize) -> Result<Meta> {
    let get = |i: usize| rec.get(i + offset).ok_or_else(|| Error::Parse { line, field: METADATA_HEADER[i].into(), msg: "missing".into() });
    Ok(Meta {
        speaker_id: parse_with(get(1)?, line, "speaker_id", parse_speaker)?,
        sentence_id: parse_with(get(2)?, line, "sentence_id", parse_sentence_id)?,
        emotion: parse_with(get(3)?, line, "emotion", |s| s.parse())?,
        intensity: parse_with(get(4)?, line, "intensity", |s| s.parse())?,
        alpha: {
            let a = parse_f64(get(5)?, line, "alpha")?;
            if !(-1.0..=1.0).contains(&a) {
                return Err(Error::Parse { line, field: "alpha".into(), msg: format!("{a} outside [-1, 1]") });
            }
            a
        },
    })
}

fn check_header(rec: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let got: Vec<&str> = rec.iter().map(str::trim).collect();
    if got != expected {
        return Err(Error::Parse { line: 1, field: "header".into(), msg: format!("expected {}", expected.join(",")) });
    }
    Ok(())
}

/// Parses the canonical one-row-per-word CSV. Clips keep first-appearance order;
/// words are ordered by `word_index`.
pub fn parse_alignments_csv<R: Read>(reader: R) -> Result<Vec<ClipRecord>> {
    Ok(parse_clip_rows(reader, &[])?.into_iter().map(|(c, _)| c).collect())
}

/// Shared reader for the alignment layout followed by `extra` numeric
/// columns. Returns each clip with its per-word extra values.
fn parse_clip_rows<R: Read>(reader: R, extra: &[&str]) -> Result<Vec<(ClipRecord, Vec<Vec<f64>>)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).comment(Some(b'#')).from_reader(reader);
    let header: Vec<&str> = ALIGNMENT_HEADER.iter().chain(extra).copied().collect();
    check_header(rdr.headers()?, &header)?;

    type Pending = (ClipRecord, Vec<(usize, WordAlignment, Vec<f64>)>);
    let mut order: Vec<String> = Vec::new();
    let mut clips: HashMap<String, Pending> = HashMap::new();
    for row in rdr.records() {
        let rec = row?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let clip_id = field(&rec, 0, line)?.trim().to_string();
        if clip_id.is_empty() {
            return Err(Error::Parse { line, field: "clip_id".into(), msg: "empty".into() });
        }
        let meta = parse_meta(&rec, line, 0)?;
        let word_index: usize = parse_with(field(&rec, 6, line)?, line, "word_index", |s| {
            s.trim().parse().map_err(|_| format!("`{s}` is not an index"))
        })?;
        let word = field(&rec, 7, line)?.to_string();
        let start = parse_f64(field(&rec, 8, line)?, line, "start")?;
        let end = parse_f64(field(&rec, 9, line)?, line, "end")?;
        let values = extra
            .iter()
            .enumerate()
            .map(|(k, name)| {
                let v = rec.get(ALIGNMENT_HEADER.len() + k).ok_or_else(|| Error::Parse {
                    line,
                    field: (*name).into(),
                    msg: "missing".into(),
                })?;
                parse_f64(v, line, name)
            })
            .collect::<Result<Vec<_>>>()?;

        let entry = clips.entry(clip_id.clone()).or_insert_with(|| {
            order.push(clip_id.clone());
            (
                ClipRecord {
                    clip_id: clip_id.clone(),
                    speaker_id: meta.speaker_id,
                    sentence_id: meta.sentence_id,
                    emotion: meta.emotion,
                    intensity: meta.intensity,
                    alpha: meta.alpha,
                    words: Vec::new(),
                },
                Vec::new(),
            )
        });
        let c = &entry.0;
        if c.speaker_id != meta.speaker_id
            || c.sentence_id != meta.sentence_id
            || c.emotion != meta.emotion
            || c.intensity != meta.intensity
            || c.alpha != meta.alpha
        {
            return Err(Error::Parse { line, field: "clip_id".into(), msg: format!("metadata for clip {clip_id} differs from earlier rows") });
        }
        entry.1.push((word_index, WordAlignment { word, start, end }, values));
    }

    let mut out = Vec::with_capacity(order.len());
    for id in order {
        let (mut clip, mut words) = clips.remove(&id).expect("inserted above");
        words.sort_by_key(|(i, _, _)| *i);
        if words.iter().enumerate().any(|(k, (i, _, _))| k != *i) {
            return Err(Error::InvalidClip { clip_id: id, msg: "word_index values are not 0..n".into() });
        }
        let mut extras = Vec::with_capacity(words.len());
        clip.words = words
            .into_iter()
            .map(|(_, w, e)| {
                extras.push(e);
                w
            })
            .collect();
        clip.validate()?;
        out.push((clip, extras));
    }
    Ok(out)
}

/// A prepared corpus: the retained clips with each word's neutral reference
/// duration and relative length.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub records: Vec<ClipRecord>,
    pub references: Vec<Vec<f64>>,
    pub relative: Vec<RelativeSequence>,
}

pub const DATASET_EXTRA: [&str; 2] = ["reference", "r"];

impl Dataset {
    /// Computes per-speaker neutral references and relative lengths.
    pub fn from_records(records: Vec<ClipRecord>) -> Result<Self> {
        let relative = relative_dataset(&records)?;
        let references = records
            .iter()
            .zip(&relative)
            .map(|(c, r)| c.durations().iter().zip(&r.values).map(|(d, v)| d / (1.0 + v)).collect())
            .collect();
        Ok(Self { records, references, relative })
    }

    /// Mean reference duration of each word of a sentence over all clips of
    /// that sentence; `None` for sentences without clips.
    pub fn sentence_references(&self) -> Vec<Option<Vec<f64>>> {
        let mut sums: Vec<Option<(Vec<f64>, usize)>> = vec![None; SENTENCES.len()];
        for (c, r) in self.records.iter().zip(&self.references) {
            let slot = sums[c.sentence_id].get_or_insert_with(|| (vec![0.0; r.len()], 0));
            slot.0.iter_mut().zip(r).for_each(|(a, b)| *a += b);
            slot.1 += 1;
        }
        sums.into_iter().map(|s| s.map(|(v, n)| v.into_iter().map(|x| x / n as f64).collect())).collect()
    }
}

/// Dataset layout: the alignment columns followed by `reference,r`.
pub fn write_dataset_csv<W: Write>(writer: W, data: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let header: Vec<&str> = ALIGNMENT_HEADER.iter().chain(&DATASET_EXTRA).copied().collect();
    w.write_record(&header)?;
    for ((c, refs), rel) in data.records.iter().zip(&data.references).zip(&data.relative) {
        for (i, word) in c.words.iter().enumerate() {
            w.write_record([
                c.clip_id.clone(),
                c.speaker_id.to_string(),
                c.sentence_id.to_string(),
                c.emotion.to_string(),
                c.intensity.to_string(),
                format!("{}", c.alpha),
                i.to_string(),
                word.word.clone(),
                fmt_seconds(word.start),
                fmt_seconds(word.end),
                format!("{}", refs[i]),
                format!("{}", rel.values[i]),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_dataset_csv<R: Read>(reader: R) -> Result<Dataset> {
    let rows = parse_clip_rows(reader, &DATASET_EXTRA)?;
    let mut data = Dataset { records: Vec::new(), references: Vec::new(), relative: Vec::new() };
    for (clip, extras) in rows {
        data.references.push(extras.iter().map(|e| e[0]).collect());
        data.relative.push(RelativeSequence {
            sentence_id: clip.sentence_id,
            emotion: clip.emotion,
            speaker_id: clip.speaker_id,
            values: extras.iter().map(|e| e[1]).collect(),
        });
        data.records.push(clip);
    }
    Ok(data)
}

fn fmt_seconds(v: f64) -> String {
    let short = format!("{v:.3}");
    if short.parse::<f64>() == Ok(v) {
        short
    } else {
        format!("{v}")
    }
}

/// Writes records in the canonical CSV layout; seconds carry at least three
/// decimals and round-trip exactly.
pub fn write_alignments_csv<W: Write>(writer: W, records: &[ClipRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(ALIGNMENT_HEADER)?;
    for c in records {
        for (i, word) in c.words.iter().enumerate() {
            w.write_record([
                c.clip_id.clone(),
                c.speaker_id.to_string(),
                c.sentence_id.to_string(),
                c.emotion.to_string(),
                c.intensity.to_string(),
                format!("{}", c.alpha),
                i.to_string(),
                word.word.clone(),
                fmt_seconds(word.start),
                fmt_seconds(word.end),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct GentleWord {
    #[serde(rename = "alignedWord")]
    aligned_word: Option<String>,
    word: Option<String>,
    case: Option<String>,
    start: Option<f64>,
    end: Option<f64>,
}

#[derive(Deserialize)]
struct GentleDoc {
    words: Vec<GentleWord>,
}

/// Reads `metadata.csv` (`clip_id,speaker_id,sentence_id,emotion,intensity,alpha`)
/// and the aligner JSON `<clip_id>.json` for each listed clip.
pub fn parse_gentle_dir(dir: &Path) -> Result<Vec<ClipRecord>> {
    let meta_path = dir.join("metadata.csv");
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(&meta_path)?;
    check_header(rdr.headers()?, &METADATA_HEADER)?;
    let mut out = Vec::new();
    for row in rdr.records() {
        let rec = row?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let clip_id = rec.get(0).unwrap_or("").trim().to_string();
        let meta = parse_meta(&rec, line, 0)?;
        let json_path = dir.join(format!("{clip_id}.json"));
        let text = std::fs::read_to_string(&json_path)?;
        let doc: GentleDoc = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidClip { clip_id: clip_id.clone(), msg: format!("bad aligner JSON: {e}") })?;
        let words = doc
            .words
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                let token = w.aligned_word.or(w.word).unwrap_or_default();
                if w.case.as_deref().is_some_and(|c| c != "success") {
                    return Err(Error::InvalidClip { clip_id: clip_id.clone(), msg: format!("word {i} `{token}` was not aligned") });
                }
                match (w.start, w.end) {
                    (Some(start), Some(end)) => Ok(WordAlignment { word: token, start, end }),
                    _ => Err(Error::InvalidClip { clip_id: clip_id.clone(), msg: format!("word {i} `{token}` has no timestamps") }),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let clip = ClipRecord {
            clip_id,
            speaker_id: meta.speaker_id,
            sentence_id: meta.sentence_id,
            emotion: meta.emotion,
            intensity: meta.intensity,
            alpha: meta.alpha,
            words,
        };
        clip.validate()?;
        out.push(clip);
    }
    Ok(out)
}

/// Reads a `sentence_id,word_index,pos_tag` CSV.
pub fn read_pos_table(path: &Path) -> Result<PosTable> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    check_header(rdr.headers()?, &["sentence_id", "word_index", "pos_tag"])?;
    let mut rows = Vec::new();
    for row in rdr.records() {
        let rec = row?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let s = parse_with(rec.get(0).unwrap_or(""), line, "sentence_id", parse_sentence_id)?;
        let w: usize = parse_with(rec.get(1).unwrap_or(""), line, "word_index", |s| {
            s.trim().parse().map_err(|_| format!("`{s}` is not an index"))
        })?;
        let tag = rec.get(2).unwrap_or("").trim().to_ascii_uppercase();
        rows.push((s, w, tag));
    }
    PosTable::from_rows(rows)
}
