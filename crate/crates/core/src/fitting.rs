// SPDX-License-Identifier: MIT OR Apache-2.0

//! Noise-scale estimation and segment-wise signal fitting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{ChangePointSet, Scenario, TimeSeries};

/// `Φ⁻¹(3/4)`, the median of `|Z|` for standard normal `Z`.
pub const PHI_INV_3_4: f64 = 0.674_489_750_196_081_7;

/// Order of the differences used by [`mad_sigma`] and the variance of the
/// differenced white noise in units of `σ²`.
fn difference_order(scenario: Scenario) -> (usize, f64) {
    match scenario {
        Scenario::PcwsConstMean | Scenario::PcwsConstMeanVar | Scenario::PcwsConstMeanHt => (1, 2.0),
        Scenario::PcwsLinContMean | Scenario::PcwsLinMean => (2, 6.0),
        Scenario::PcwsQuadMean => (3, 20.0),
    }
}

/// Lower median: the element of rank `ceil(n / 2)`.
fn lower_median(mut v: Vec<f64>) -> f64 {
    let k = v.len().div_ceil(2) - 1;
    *v.select_nth_unstable_by(k, f64::total_cmp).1
}

/// Robust noise scale from the median absolute `k`-th difference.
///
/// Differences of order one, two and three annihilate constant, linear and
/// quadratic segments respectively, so only the few that straddle a
/// change-point are contaminated.
pub fn mad_sigma(y: &TimeSeries, scenario: Scenario) -> Result<f64> {
    let (order, var_factor) = difference_order(scenario);
    if y.len() <= order {
        return Err(Error::TooShort {
            len: y.len(),
            what: "noise estimate needs more observations than the difference order",
        });
    }
    let mut d = y.values().to_vec();
    for _ in 0..order {
        d = d.windows(2).map(|w| w[1] - w[0]).collect();
    }
    let abs: Vec<f64> = d.into_iter().map(f64::abs).collect();
    Ok(lower_median(abs) / (PHI_INV_3_4 * var_factor.sqrt()))
}

/// A fitted signal for a given segmentation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentFit {
    pub fitted: Vec<f64>,
    /// Per-observation noise scale: the segment MLE for the mean-variance
    /// scenario, otherwise the constant `sqrt(rss / T)`.
    pub sigma_t: Vec<f64>,
    /// Per segment: `[level]`, `[level, sd]` (mean-variance), or the
    /// polynomial coefficients in local time `u = t - start`, lowest order
    /// first.
    pub params: Vec<Vec<f64>>,
    pub rss: f64,
}

/// Checks that every segment can be fitted without rank deficiency.
pub fn check_segments(cps: &ChangePointSet, scenario: Scenario) -> Result<()> {
    let len = cps.series_len();
    if scenario == Scenario::PcwsLinContMean {
        // The spline needs distinct knots {1, tau..., T}.
        if len < 2 {
            return Err(Error::TooShort { len, what: "a linear fit needs two observations" });
        }
        if cps.taus().first() == Some(&1) {
            return Err(Error::InvalidChangePoints("a kink at t = 1 is not identifiable".into()));
        }
        return Ok(());
    }
    let d = scenario.dim();
    if let Some((s, e)) = cps.segments().into_iter().find(|(s, e)| e + 1 - s < d) {
        return Err(Error::InvalidChangePoints(format!("segment [{s}, {e}] is shorter than {d} observations")));
    }
    Ok(())
}

/// Least-squares (or Gaussian MLE) fit of the scenario's signal class on the
/// segments delimited by `cps`.
pub fn fit_segments(y: &TimeSeries, cps: &ChangePointSet, scenario: Scenario) -> Result<SegmentFit> {
    if cps.series_len() != y.len() {
        return Err(Error::LengthMismatch { left: y.len(), right: cps.series_len() });
    }
    check_segments(cps, scenario)?;
    let y = y.values();
    let mut fitted = vec![0.0; y.len()];
    let mut params = Vec::with_capacity(cps.q() + 1);
    let mut seg_sd = Vec::new();
    match scenario {
        Scenario::PcwsLinContMean => {
            params = linear_spline(y, cps.taus(), &mut fitted);
        }
        Scenario::PcwsConstMeanVar => {
            for (s, e) in cps.segments() {
                let seg = &y[s - 1..e];
                let n = seg.len() as f64;
                let mean = seg.iter().sum::<f64>() / n;
                let var = seg.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                fitted[s - 1..e].fill(mean);
                params.push(vec![mean, var.sqrt()]);
                seg_sd.push((s, e, var.sqrt()));
            }
        }
        other => {
            let degree = match other {
                Scenario::PcwsLinMean => 1,
                Scenario::PcwsQuadMean => 2,
                _ => 0,
            };
            for (s, e) in cps.segments() {
                params.push(polynomial(&y[s - 1..e], degree, &mut fitted[s - 1..e]));
            }
        }
    }
    let rss: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b).powi(2)).sum();
    let sigma_t = if seg_sd.is_empty() {
        vec![(rss / y.len() as f64).sqrt(); y.len()]
    } else {
        let mut v = vec![0.0; y.len()];
        for (s, e, sd) in seg_sd {
            v[s - 1..e].fill(sd);
        }
        v
    };
    Ok(SegmentFit { fitted, sigma_t, params, rss })
}

/// Fits a polynomial of `degree <= 2` to `seg` through the discrete
/// orthogonal polynomials on `0..n`, writing fitted values into `out`.
fn polynomial(seg: &[f64], degree: usize, out: &mut [f64]) -> Vec<f64> {
    let n = seg.len();
    let nf = n as f64;
    let c = (nf - 1.0) / 2.0;
    let k2 = (nf * nf - 1.0) / 12.0;
    let basis = |k: usize, u: f64| match k {
        0 => 1.0,
        1 => u - c,
        _ => (u - c).powi(2) - k2,
    };
    let mut coef = [0.0; 3];
    for (k, a) in coef.iter_mut().enumerate().take(degree + 1) {
        let (mut num, mut den) = (0.0, 0.0);
        for (i, v) in seg.iter().enumerate() {
            let p = basis(k, i as f64);
            num += p * v;
            den += p * p;
        }
        *a = num / den;
    }
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..=degree).map(|k| coef[k] * basis(k, i as f64)).sum();
    }
    // Back to monomials in u.
    let [a0, a1, a2] = coef;
    let monomial = [a0 - a1 * c + a2 * (c * c - k2), a1 - 2.0 * a2 * c, a2];
    monomial[..=degree].to_vec()
}

/// Continuous piecewise-linear least squares with knots at `taus`.
///
/// The spline is parametrised by its values at the nodes `{1, tau..., T}`
/// (hat-function basis), which makes the normal equations tridiagonal.
/// Returns `[value at segment start, slope]` per segment.
fn linear_spline(y: &[f64], taus: &[usize], fitted: &mut [f64]) -> Vec<Vec<f64>> {
    let len = y.len();
    let mut nodes = Vec::with_capacity(taus.len() + 2);
    nodes.push(1);
    nodes.extend_from_slice(taus);
    nodes.push(len);
    let k = nodes.len();
    let mut diag = vec![0.0; k];
    let mut off = vec![0.0; k - 1];
    let mut rhs = vec![0.0; k];
    for j in 0..k - 1 {
        let (a, b) = (nodes[j], nodes[j + 1]);
        let span = (b - a) as f64;
        // Shared nodes are counted once, in the span to their right.
        let last = if j == k - 2 { b } else { b - 1 };
        for t in a..=last {
            let w = (t - a) as f64 / span;
            let (h0, h1) = (1.0 - w, w);
            diag[j] += h0 * h0;
            diag[j + 1] += h1 * h1;
            off[j] += h0 * h1;
            rhs[j] += h0 * y[t - 1];
            rhs[j + 1] += h1 * y[t - 1];
        }
    }
    let v = solve_tridiagonal(&diag, &off, &mut rhs);
    for j in 0..k - 1 {
        let (a, b) = (nodes[j], nodes[j + 1]);
        let slope = (v[j + 1] - v[j]) / (b - a) as f64;
        for t in a..=b {
            fitted[t - 1] = v[j] + slope * (t - a) as f64;
        }
    }
    ChangePointSet::new(taus.to_vec(), len)
        .expect("validated by the caller")
        .segments()
        .into_iter()
        .enumerate()
        .map(|(j, (s, _))| {
            let slope = (v[j + 1] - v[j]) / (nodes[j + 1] - nodes[j]) as f64;
            vec![fitted[s - 1], slope]
        })
        .collect()
}

/// Solves a symmetric positive definite tridiagonal system (Thomas
/// algorithm); `rhs` is overwritten.
fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &mut [f64]) -> Vec<f64> {
    let n = diag.len();
    let mut d = diag.to_vec();
    for i in 1..n {
        let m = off[i - 1] / d[i - 1];
        d[i] -= m * off[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    let mut x = vec![0.0; n];
    x[n - 1] = rhs[n - 1] / d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = (rhs[i] - off[i] * x[i + 1]) / d[i];
    }
    x
}
