//! Objective metrics, distribution summaries and significance tests.

mod dtw;
mod report;
mod stats;
mod summary;
mod tukey_table;

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

pub use dtw::{dtw, frame_disturbance, lengths_to_envelope, FdMode, WarpPath};
pub use report::{evaluate, write_metrics_csv, CellMetrics, EvalOptions, EvalReport, METRICS_HEADER};
pub use stats::{anova_oneway, studentized_range_critical, tukey_hsd, AnovaResult, TukeyPair};
pub use summary::{
    distribution_summary, mean_variance, rate_of_speech, ros_groups, write_anova_csv, write_meanvar_csv,
    write_pairs_csv, write_tukey_csv, DistributionSummary, Factor, MeanVar, PairPoint, ANOVA_HEADER, MEANVAR_HEADER,
    PAIRS_HEADER, TUKEY_HEADER,
};

fn check_same_len(what: &'static str, a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { what, left: a.len(), right: b.len() });
    }
    Ok(())
}

pub fn rmse(a: &[f64], b: &[f64]) -> Result<f64> {
    check_same_len("rmse", a, b)?;
    if a.is_empty() {
        return Err(Error::Empty("rmse"));
    }
    let ss: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    Ok((ss / a.len() as f64).sqrt())
}

/// Pearson correlation; zero variance in either input is an error.
pub fn pcc(a: &[f64], b: &[f64]) -> Result<f64> {
    check_same_len("pcc", a, b)?;
    if a.len() < 2 {
        return Err(Error::Invalid("pcc needs at least 2 points".into()));
    }
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::Invalid("pcc is undefined for a zero-variance input".into()));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Element-wise mean sequence per key.
pub fn population_means<K: Eq + Hash + Clone>(real: &[(K, Vec<f64>)]) -> Result<HashMap<K, Vec<f64>>> {
    let mut sums: HashMap<K, (Vec<f64>, usize)> = HashMap::new();
    for (k, v) in real {
        let e = sums.entry(k.clone()).or_insert_with(|| (vec![0.0; v.len()], 0));
        check_same_len("population_means", &e.0, v)?;
        e.0.iter_mut().zip(v).for_each(|(s, x)| *s += x);
        e.1 += 1;
    }
    Ok(sums.into_iter().map(|(k, (s, n))| (k, s.into_iter().map(|x| x / n as f64).collect())).collect())
}

/// Mean over generated sequences of their mean squared deviation from the
/// real mean sequence with the same key.
pub fn mse_to_population_mean<K: Eq + Hash + Clone + std::fmt::Debug>(
    generated: &[(K, Vec<f64>)],
    real: &[(K, Vec<f64>)],
) -> Result<f64> {
    if generated.is_empty() {
        return Err(Error::Empty("mse_to_population_mean"));
    }
    let means = population_means(real)?;
    let mut total = 0.0;
    for (k, g) in generated {
        let m = means.get(k).ok_or_else(|| Error::Invalid(format!("key {k:?} has no real data")))?;
        check_same_len("mse_to_population_mean", g, m)?;
        total += g.iter().zip(m).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / g.len() as f64;
    }
    Ok(total / generated.len() as f64)
}
