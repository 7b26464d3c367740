use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::tukey_table::{DF_POINTS, K_POINTS, Q_01, Q_05};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct AnovaResult {
    pub f: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub ss_between: f64,
    pub ss_within: f64,
    /// Upper-tail probability of `f` under the null.
    pub p_value: f64,
    pub alpha: f64,
    pub significant: bool,
}

impl AnovaResult {
    pub fn ms_within(&self) -> f64 {
        self.ss_within / self.df_within as f64
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn check_groups(groups: &[Vec<f64>]) -> Result<(usize, usize)> {
    let k = groups.len();
    let n: usize = groups.iter().map(Vec::len).sum();
    if k < 2 {
        return Err(Error::Invalid(format!("need at least 2 groups, got {k}")));
    }
    if groups.iter().any(Vec::is_empty) {
        return Err(Error::Invalid("every group needs at least one value".into()));
    }
    if n <= k {
        return Err(Error::Invalid(format!("{n} observations in {k} groups leaves no within-group degrees of freedom")));
    }
    Ok((k, n))
}

/// One-way ANOVA, significance judged at `alpha`.
pub fn anova_oneway(groups: &[Vec<f64>], alpha: f64) -> Result<AnovaResult> {
    let (k, n) = check_groups(groups)?;
    let grand = groups.iter().flatten().sum::<f64>() / n as f64;
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for g in groups {
        let m = mean(g);
        ssb += g.len() as f64 * (m - grand).powi(2);
        ssw += g.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    }
    let (dfb, dfw) = (k - 1, n - k);
    let msb = ssb / dfb as f64;
    let msw = ssw / dfw as f64;
    let f = if ssb == 0.0 {
        0.0
    } else if msw == 0.0 {
        f64::INFINITY
    } else {
        msb / msw
    };
    let p_value = if f.is_infinite() {
        0.0
    } else {
        let dist = FisherSnedecor::new(dfb as f64, dfw as f64).map_err(|e| Error::Invalid(e.to_string()))?;
        dist.sf(f)
    };
    Ok(AnovaResult {
        f,
        df_between: dfb,
        df_within: dfw,
        ss_between: ssb,
        ss_within: ssw,
        p_value,
        alpha,
        significant: p_value < alpha,
    })
}

fn bracket<T: Copy + PartialOrd>(points: &[T], x: T) -> Option<(usize, usize)> {
    let hi = points.iter().position(|&p| p >= x)?;
    Some(if points[hi] == x || hi == 0 { (hi, hi) } else { (hi - 1, hi) })
}

/// Critical value of the studentized range for `k` groups and `df` error
/// degrees of freedom. Interpolates linearly in `1/df` and in `k` between
/// table points.
pub fn studentized_range_critical(alpha: f64, k: usize, df: f64) -> Result<f64> {
    let table = if alpha == 0.05 {
        &Q_05
    } else if alpha == 0.01 {
        &Q_01
    } else {
        return Err(Error::Invalid(format!("no studentized range table for alpha {alpha} (0.01 or 0.05)")));
    };
    let (k0, k1) = bracket(&K_POINTS, k)
        .filter(|_| k >= K_POINTS[0])
        .ok_or_else(|| Error::Invalid(format!("{k} groups outside the table (2..=100)")))?;
    if !(df >= DF_POINTS[0]) {
        return Err(Error::Invalid(format!("{df} error degrees of freedom is below the table minimum")));
    }
    let (d0, d1) = bracket(&DF_POINTS, df).expect("table ends at infinity");

    let at_k = |row: &[f64; 28]| {
        if k0 == k1 {
            row[k0]
        } else {
            let t = (k - K_POINTS[k0]) as f64 / (K_POINTS[k1] - K_POINTS[k0]) as f64;
            row[k0] + t * (row[k1] - row[k0])
        }
    };
    let (q0, q1) = (at_k(&table[d0]), at_k(&table[d1]));
    if d0 == d1 {
        return Ok(q0);
    }
    let inv = |d: f64| if d.is_infinite() { 0.0 } else { 1.0 / d };
    let t = (inv(DF_POINTS[d0]) - inv(df)) / (inv(DF_POINTS[d0]) - inv(DF_POINTS[d1]));
    Ok(q0 + t * (q1 - q0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TukeyPair {
    pub a: usize,
    pub b: usize,
    /// `mean_b - mean_a`.
    pub mean_diff: f64,
    pub q: f64,
    pub q_critical: f64,
    pub significant: bool,
}

/// Tukey HSD (Tukey-Kramer for unequal sizes) over all group pairs `a < b`.
pub fn tukey_hsd(groups: &[Vec<f64>], alpha: f64) -> Result<Vec<TukeyPair>> {
    let anova = anova_oneway(groups, alpha)?;
    let q_critical = studentized_range_critical(alpha, groups.len(), anova.df_within as f64)?;
    let msw = anova.ms_within();
    let means: Vec<f64> = groups.iter().map(|g| mean(g)).collect();
    let mut out = Vec::new();
    for a in 0..groups.len() {
        for b in a + 1..groups.len() {
            let (na, nb) = (groups[a].len() as f64, groups[b].len() as f64);
            let n_h = 2.0 / (1.0 / na + 1.0 / nb);
            let diff = means[b] - means[a];
            let q = if diff == 0.0 { 0.0 } else { diff.abs() / (msw / n_h).sqrt() };
            out.push(TukeyPair { a, b, mean_diff: diff, q, q_critical, significant: q > q_critical });
        }
    }
    Ok(out)
}
