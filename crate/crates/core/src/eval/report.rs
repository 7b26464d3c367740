use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{dtw, frame_disturbance, lengths_to_envelope, pcc, rmse, FdMode};
use crate::corpus::{Emotion, RelativeSequence};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalOptions {
    pub fd_mode: FdMode,
    /// Envelope frames per second for DTW.
    pub frame_rate: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { fd_mode: FdMode::Rms, frame_rate: 100.0 }
    }
}

/// Metrics for one (sentence, emotion) cell, averaged over its generated sequences.
#[derive(Clone, Debug, PartialEq)]
pub struct CellMetrics {
    pub sentence_id: usize,
    pub emotion: Emotion,
    pub n_generated: usize,
    pub n_real: usize,
    pub mse_to_mean: f64,
    pub rmse: f64,
    /// `None` when every generated sequence had zero variance.
    pub pcc: Option<f64>,
    pub dtw_distance: f64,
    pub frame_disturbance: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvalReport {
    pub cells: Vec<CellMetrics>,
    /// Cells present in only one of the generated and real sets.
    pub missing: Vec<(usize, Emotion)>,
}

fn mean_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| s / n as f64)
}

impl EvalReport {
    pub fn mean_mse_to_mean(&self) -> Option<f64> {
        mean_of(self.cells.iter().map(|c| c.mse_to_mean))
    }

    pub fn mean_rmse(&self) -> Option<f64> {
        mean_of(self.cells.iter().map(|c| c.rmse))
    }

    pub fn mean_pcc(&self) -> Option<f64> {
        mean_of(self.cells.iter().filter_map(|c| c.pcc))
    }

    pub fn mean_dtw(&self) -> Option<f64> {
        mean_of(self.cells.iter().map(|c| c.dtw_distance))
    }

    pub fn mean_fd(&self) -> Option<f64> {
        mean_of(self.cells.iter().map(|c| c.frame_disturbance))
    }
}

type Cells<'a> = BTreeMap<(usize, usize), Vec<&'a RelativeSequence>>;

fn by_cell(seqs: &[RelativeSequence]) -> Cells<'_> {
    let mut m: Cells<'_> = BTreeMap::new();
    for s in seqs {
        m.entry((s.sentence_id, s.emotion.index())).or_default().push(s);
    }
    m
}

/// Scores generated sequences against the real mean of each
/// (sentence, emotion) cell. RMSE, PCC and DTW compare absolute durations
/// `reference * (1 + r)`; `reference` is indexed by sentence.
pub fn evaluate(
    generated: &[RelativeSequence],
    real: &[RelativeSequence],
    reference: &[Vec<f64>],
    opts: &EvalOptions,
) -> Result<EvalReport> {
    let gen_cells = by_cell(generated);
    let real_cells = by_cell(real);
    let mut report = EvalReport::default();
    for key in gen_cells.keys().chain(real_cells.keys()).copied().collect::<std::collections::BTreeSet<_>>() {
        let emotion = Emotion::from_index(key.1).expect("valid index");
        let (Some(gens), Some(reals)) = (gen_cells.get(&key), real_cells.get(&key)) else {
            report.missing.push((key.0, emotion));
            continue;
        };
        let refs = reference.get(key.0).ok_or(Error::NoNeutralReference(key.0))?;
        let width = refs.len();
        let mut mean = vec![0.0; width];
        for r in reals {
            if r.values.len() != width {
                return Err(Error::LengthMismatch { what: "real sequence", left: r.values.len(), right: width });
            }
            mean.iter_mut().zip(&r.values).for_each(|(m, v)| *m += v / reals.len() as f64);
        }
        let abs = |r: &[f64]| r.iter().zip(refs).map(|(r, d)| d * (1.0 + r)).collect::<Vec<_>>();
        let mean_abs = abs(&mean);
        let mean_env = lengths_to_envelope(&mean, refs, opts.frame_rate)?;

        let (mut mse, mut rm, mut dd, mut fd) = (0.0, 0.0, 0.0, 0.0);
        let mut pccs = Vec::new();
        for g in gens {
            if g.values.len() != width {
                return Err(Error::LengthMismatch { what: "generated sequence", left: g.values.len(), right: width });
            }
            mse += g.values.iter().zip(&mean).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / width as f64;
            let g_abs = abs(&g.values);
            rm += rmse(&g_abs, &mean_abs)?;
            if let Ok(p) = pcc(&g_abs, &mean_abs) {
                pccs.push(p);
            }
            let env = lengths_to_envelope(&g.values, refs, opts.frame_rate)?;
            let (d, path) = dtw(&env, &mean_env)?;
            dd += d;
            fd += frame_disturbance(&path, opts.fd_mode);
        }
        let n = gens.len() as f64;
        report.cells.push(CellMetrics {
            sentence_id: key.0,
            emotion,
            n_generated: gens.len(),
            n_real: reals.len(),
            mse_to_mean: mse / n,
            rmse: rm / n,
            pcc: mean_of(pccs.into_iter()),
            dtw_distance: dd / n,
            frame_disturbance: fd / n,
        });
    }
    Ok(report)
}

pub const METRICS_HEADER: &str =
    "model,sentence_id,emotion,n_generated,n_real,mse_to_mean,rmse,pcc,dtw_distance,frame_disturbance";

pub fn write_metrics_csv<W: Write>(out: &mut W, model: &str, report: &EvalReport) -> Result<()> {
    writeln!(out, "{METRICS_HEADER}")?;
    for c in &report.cells {
        let pcc = c.pcc.map_or(String::new(), |p| p.to_string());
        writeln!(
            out,
            "{model},{},{},{},{},{},{},{pcc},{},{}",
            c.sentence_id, c.emotion, c.n_generated, c.n_real, c.mse_to_mean, c.rmse, c.dtw_distance, c.frame_disturbance
        )?;
    }
    Ok(())
}
