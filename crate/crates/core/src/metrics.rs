// SPDX-License-Identifier: MIT OR Apache-2.0

//! Accuracy measures for benchmark runs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::ChangePointSet;

/// Scaled Hausdorff distance between two segmentations, with both sets
/// augmented by the endpoints `0` and `T`. Lies in `[0, 1]`.
pub fn hausdorff_scaled(truth: &ChangePointSet, est: &ChangePointSet, len: usize) -> Result<f64> {
    for set in [truth, est] {
        if set.series_len() != len {
            return Err(Error::LengthMismatch { left: len, right: set.series_len() });
        }
    }
    if len == 0 {
        return Ok(0.0);
    }
    let augment = |c: &ChangePointSet| {
        let mut v = Vec::with_capacity(c.q() + 2);
        v.push(0);
        v.extend_from_slice(c.taus());
        v.push(len);
        v
    };
    let (a, b) = (augment(truth), augment(est));
    let d = one_sided(&a, &b).max(one_sided(&b, &a));
    Ok(d as f64 / len as f64)
}

/// `max_{x in from} min_{y in to} |x - y|` for sorted `to`.
fn one_sided(from: &[usize], to: &[usize]) -> usize {
    from.iter()
        .map(|&x| {
            let i = to.partition_point(|&y| y < x);
            let right = to.get(i).map(|&y| y - x);
            let left = i.checked_sub(1).map(|j| x - to[j]);
            left.into_iter().chain(right).min().expect("`to` is nonempty")
        })
        .max()
        .unwrap_or(0)
}

/// Mean squared deviation.
pub fn mse(f: &[f64], f_hat: &[f64]) -> Result<f64> {
    if f.len() != f_hat.len() {
        return Err(Error::LengthMismatch { left: f.len(), right: f_hat.len() });
    }
    if f.is_empty() {
        return Err(Error::EmptyInput("signal"));
    }
    Ok(f.iter().zip(f_hat).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / f.len() as f64)
}

/// Counts of `q̂ - q` in the buckets `≤-3, -2, -1, 0, 1, 2, ≥3`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QDiffHistogram(pub [usize; 7]);

impl QDiffHistogram {
    pub const LABELS: [&'static str; 7] = ["<=-3", "-2", "-1", "0", "1", "2", ">=3"];

    pub fn add(&mut self, diff: i64) {
        self.0[(diff.clamp(-3, 3) + 3) as usize] += 1;
    }

    pub fn count(&self, diff: i64) -> usize {
        self.0[(diff.clamp(-3, 3) + 3) as usize]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

/// Monte-Carlo summary of a benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub model: String,
    pub noise: String,
    pub method: String,
    pub replicates: usize,
    pub q_diff_hist: QDiffHistogram,
    pub avg_mse: f64,
    #[serde(rename = "avg_dH")]
    pub avg_dh: f64,
    pub avg_runtime_s: f64,
    /// How often each candidate scenario was selected (one entry when a
    /// single scenario is used).
    pub selected: Vec<(String, usize)>,
}

impl fmt::Display for RunReport {
    /// Plain-text row in the layout `method | model | q̂-q buckets | MSE |
    /// d_H·10² | time`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<16} {:<8}", "Method", "Model")?;
        for l in QDiffHistogram::LABELS {
            write!(f, " {l:>5}")?;
        }
        writeln!(f, " {:>8} {:>8} {:>8}", "MSE", "dH*1e2", "time(s)")?;
        write!(f, "{:<16} {:<8}", self.method, self.model)?;
        for c in self.q_diff_hist.0 {
            write!(f, " {c:>5}")?;
        }
        writeln!(f, " {:>8.4} {:>8.3} {:>8.3}", self.avg_mse, self.avg_dh * 100.0, self.avg_runtime_s)?;
        if self.selected.len() > 1 {
            let sel: Vec<String> = self.selected.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(f, "selected: {}", sel.join(", "))?;
        }
        Ok(())
    }
}
