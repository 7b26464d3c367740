use std::collections::BTreeMap;
use std::io::Write;

use super::{AnovaResult, TukeyPair};
use crate::corpus::{ClipRecord, Emotion, RelativeSequence};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanVar {
    pub mean: f64,
    /// Population variance (divides by the sequence length).
    pub variance: f64,
}

pub fn mean_variance(values: &[f64]) -> Result<MeanVar> {
    if values.is_empty() {
        return Err(Error::Empty("mean_variance"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Ok(MeanVar { mean, variance })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairPoint {
    pub sentence_id: usize,
    pub emotion: Emotion,
    pub r_i: f64,
    pub r_j: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistributionSummary {
    /// Keyed by word-index pair `(i, j)` with `i < j`.
    pub pairs: BTreeMap<(usize, usize), Vec<PairPoint>>,
    /// One entry per input sequence, in input order.
    pub meanvar: Vec<(usize, Emotion, usize, MeanVar)>,
}

pub fn distribution_summary(seqs: &[RelativeSequence]) -> Result<DistributionSummary> {
    if seqs.is_empty() {
        return Err(Error::Empty("distribution_summary"));
    }
    let mut pairs: BTreeMap<(usize, usize), Vec<PairPoint>> = BTreeMap::new();
    let mut meanvar = Vec::with_capacity(seqs.len());
    for s in seqs {
        for i in 0..s.values.len() {
            for j in i + 1..s.values.len() {
                pairs.entry((i, j)).or_default().push(PairPoint {
                    sentence_id: s.sentence_id,
                    emotion: s.emotion,
                    r_i: s.values[i],
                    r_j: s.values[j],
                });
            }
        }
        meanvar.push((s.sentence_id, s.emotion, s.speaker_id, mean_variance(&s.values)?));
    }
    Ok(DistributionSummary { pairs, meanvar })
}

/// Words per second over the clip's speech span.
pub fn rate_of_speech(clip: &ClipRecord) -> Result<f64> {
    let (first, last) = match (clip.words.first(), clip.words.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::InvalidClip { clip_id: clip.clip_id.clone(), msg: "no words".into() }),
    };
    let span = last.end - first.start;
    if !(span > 0.0) {
        return Err(Error::InvalidClip { clip_id: clip.clip_id.clone(), msg: "zero-length speech span".into() });
    }
    Ok(clip.words.len() as f64 / span)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    Emotion,
    Speaker,
    Intensity,
}

impl Factor {
    pub fn name(self) -> &'static str {
        match self {
            Self::Emotion => "emotion",
            Self::Speaker => "speaker",
            Self::Intensity => "intensity",
        }
    }
}

/// Rate of speech grouped by `factor`; empty groups are dropped. Returns the
/// group labels alongside the groups.
pub fn ros_groups(records: &[ClipRecord], factor: Factor) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut groups: BTreeMap<(usize, String), Vec<f64>> = BTreeMap::new();
    for r in records {
        let key = match factor {
            Factor::Emotion => (r.emotion.index(), r.emotion.name().to_string()),
            Factor::Speaker => (r.speaker_id, (r.speaker_id + 1001).to_string()),
            Factor::Intensity => (r.intensity as usize, r.intensity.name().to_string()),
        };
        groups.entry(key).or_default().push(rate_of_speech(r)?);
    }
    Ok(groups.into_iter().map(|((_, label), g)| (label, g)).unzip())
}

pub const PAIRS_HEADER: &str = "source,sentence_id,emotion,r_i,r_j";
pub const MEANVAR_HEADER: &str = "source,sentence_id,emotion,speaker_id,mean,variance";
pub const ANOVA_HEADER: &str = "factor,groups,f,df_between,df_within,p_value,alpha,significant";
pub const TUKEY_HEADER: &str = "factor,group_a,group_b,mean_diff,q,q_critical,significant";

/// `sources` pairs a label (e.g. `real`, `generated`) with its points.
pub fn write_pairs_csv<W: Write>(out: &mut W, sources: &[(&str, &[PairPoint])]) -> Result<()> {
    writeln!(out, "{PAIRS_HEADER}")?;
    for (source, points) in sources {
        for p in points.iter() {
            writeln!(out, "{source},{},{},{},{}", p.sentence_id, p.emotion, p.r_i, p.r_j)?;
        }
    }
    Ok(())
}

pub fn write_meanvar_csv<W: Write>(out: &mut W, sources: &[(&str, &DistributionSummary)]) -> Result<()> {
    writeln!(out, "{MEANVAR_HEADER}")?;
    for (source, summary) in sources {
        for (s, e, spk, mv) in &summary.meanvar {
            writeln!(out, "{source},{s},{e},{spk},{},{}", mv.mean, mv.variance)?;
        }
    }
    Ok(())
}

/// `rows` pairs a factor name and its group count with the ANOVA result.
pub fn write_anova_csv<W: Write>(out: &mut W, rows: &[(&str, usize, &AnovaResult)]) -> Result<()> {
    writeln!(out, "{ANOVA_HEADER}")?;
    for (factor, k, a) in rows {
        writeln!(
            out,
            "{factor},{k},{},{},{},{},{},{}",
            a.f, a.df_between, a.df_within, a.p_value, a.alpha, a.significant
        )?;
    }
    Ok(())
}

/// `rows` pairs a factor name and its group labels with the Tukey table.
pub fn write_tukey_csv<W: Write>(out: &mut W, rows: &[(&str, &[String], &[TukeyPair])]) -> Result<()> {
    writeln!(out, "{TUKEY_HEADER}")?;
    for (factor, labels, pairs) in rows {
        for p in pairs.iter() {
            writeln!(
                out,
                "{factor},{},{},{},{},{},{}",
                labels[p.a], labels[p.b], p.mean_diff, p.q, p.q_critical, p.significant
            )?;
        }
    }
    Ok(())
}
