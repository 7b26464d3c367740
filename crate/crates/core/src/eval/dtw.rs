use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Monotone alignment between two sequences, as `(i, j)` index pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WarpPath(pub Vec<(usize, usize)>);

impl WarpPath {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks the endpoints for sequences of lengths `n` and `m` and that
    /// every step is one of (1,0), (0,1), (1,1).
    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        let p = &self.0;
        if p.first() != Some(&(0, 0)) || p.last() != Some(&(n.wrapping_sub(1), m.wrapping_sub(1))) {
            return Err(Error::Invalid("warp path must run from (0,0) to (n-1,m-1)".into()));
        }
        for w in p.windows(2) {
            let (di, dj) = (w[1].0.wrapping_sub(w[0].0), w[1].1.wrapping_sub(w[0].1));
            if !matches!((di, dj), (1, 0) | (0, 1) | (1, 1)) {
                return Err(Error::Invalid(format!("illegal step {:?} -> {:?}", w[0], w[1])));
            }
        }
        Ok(())
    }
}

/// DTW with absolute-difference cost. On backtracking, equal-cost
/// predecessors are preferred in the order diagonal, (1,0), (0,1).
pub fn dtw(a: &[f64], b: &[f64]) -> Result<(f64, WarpPath)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("dtw"));
    }
    let (n, m) = (a.len(), b.len());
    let mut acc = vec![f64::INFINITY; n * m];
    let at = |i: usize, j: usize| i * m + j;
    for i in 0..n {
        for j in 0..m {
            let cost = (a[i] - b[j]).abs();
            let prev = if i == 0 && j == 0 {
                0.0
            } else {
                let mut best = f64::INFINITY;
                if i > 0 && j > 0 {
                    best = best.min(acc[at(i - 1, j - 1)]);
                }
                if i > 0 {
                    best = best.min(acc[at(i - 1, j)]);
                }
                if j > 0 {
                    best = best.min(acc[at(i, j - 1)]);
                }
                best
            };
            acc[at(i, j)] = cost + prev;
        }
    }

    let mut path = vec![(n - 1, m - 1)];
    let (mut i, mut j) = (n - 1, m - 1);
    while (i, j) != (0, 0) {
        let mut cands: Vec<(usize, usize)> = Vec::with_capacity(3);
        if i > 0 && j > 0 {
            cands.push((i - 1, j - 1));
        }
        if i > 0 {
            cands.push((i - 1, j));
        }
        if j > 0 {
            cands.push((i, j - 1));
        }
        let mut next = cands[0];
        for &c in &cands[1..] {
            if acc[at(c.0, c.1)] < acc[at(next.0, next.1)] {
                next = c;
            }
        }
        (i, j) = next;
        path.push(next);
    }
    path.reverse();
    Ok((acc[at(n - 1, m - 1)], WarpPath(path)))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FdMode {
    /// `sqrt(sum (i-j)^2 / |path|)`.
    #[default]
    Rms,
    /// `sqrt(sum (i-j)^2)`.
    SumRoot,
    /// `sum (i-j)^2 / |path|`.
    MeanSquare,
}

impl std::str::FromStr for FdMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rms" => Ok(Self::Rms),
            "sum-root" => Ok(Self::SumRoot),
            "mean-square" => Ok(Self::MeanSquare),
            _ => Err(format!("unknown frame disturbance mode `{s}` (rms, sum-root, mean-square)")),
        }
    }
}

/// How far a warp path strays from the diagonal.
pub fn frame_disturbance(path: &WarpPath, mode: FdMode) -> f64 {
    if path.is_empty() {
        return 0.0;
    }
    let ss: f64 = path.0.iter().map(|&(i, j)| (i as f64 - j as f64).powi(2)).sum();
    let n = path.len() as f64;
    match mode {
        FdMode::Rms => (ss / n).sqrt(),
        FdMode::SumRoot => ss.sqrt(),
        FdMode::MeanSquare => ss / n,
    }
}

/// Step function over frames: word `k` lasts
/// `round(frame_rate * reference[k] * (1 + r[k]))` frames at value `k + 1`.
pub fn lengths_to_envelope(relative: &[f64], reference: &[f64], frame_rate: f64) -> Result<Vec<f64>> {
    if !(frame_rate > 0.0) {
        return Err(Error::Invalid(format!("frame rate must be positive, got {frame_rate}")));
    }
    if relative.len() != reference.len() {
        return Err(Error::LengthMismatch { what: "lengths_to_envelope", left: relative.len(), right: reference.len() });
    }
    let mut out = Vec::new();
    for (k, (r, d)) in relative.iter().zip(reference).enumerate() {
        let frames = (frame_rate * d * (1.0 + r)).round();
        if !(frames >= 1.0) {
            return Err(Error::Invalid(format!("word {k} maps to {frames} frames")));
        }
        out.extend(std::iter::repeat_n((k + 1) as f64, frames as usize));
    }
    Ok(out)
}
