// SPDX-License-Identifier: MIT OR Apache-2.0

//! Model selection along the solution path by the strengthened Schwarz
//! information criterion (sSIC).

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::fit_segments;
use crate::path::{solution_path, SolutionPath};
use crate::sampler::draw_ensemble;
use crate::types::{ChangePointSet, Scenario, TimeSeries};

/// Default penalty exponent; `α = 1` is the classical SIC.
pub const DEFAULT_ALPHA: f64 = 1.0;
/// Default cap on the number of change-points of a scored model.
pub const DEFAULT_Q_MAX: usize = 25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredModel {
    pub cps: ChangePointSet,
    pub n_params: usize,
    pub neg2loglik: f64,
    pub ssic: f64,
    pub alpha: f64,
}

impl ScoredModel {
    /// Total order used for selection: score, then fewer change-points,
    /// then lexicographically smaller locations.
    fn rank(&self, other: &Self) -> Ordering {
        self.ssic
            .total_cmp(&other.ssic)
            .then(self.cps.q().cmp(&other.cps.q()))
            .then_with(|| self.cps.taus().cmp(other.cps.taus()))
    }
}

/// Estimated parameters of a model with `q` change-points: the `q`
/// locations plus the per-segment coefficients.
pub fn n_params(scenario: Scenario, q: usize) -> usize {
    q + match scenario {
        Scenario::PcwsConstMean | Scenario::PcwsConstMeanHt => q + 1,
        Scenario::PcwsLinContMean => q + 2,
        Scenario::PcwsLinMean | Scenario::PcwsConstMeanVar => 2 * (q + 1),
        Scenario::PcwsQuadMean => 3 * (q + 1),
    }
}

/// Floor applied to variance estimates before taking logs.
fn eps_rss(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    1e-12 * var.max(f64::EPSILON)
}

/// `sSIC = -2 log L + n_params · (log T)^α` for the segmentation `cps`.
///
/// The Gaussian likelihood is profiled over the noise variance and additive
/// constants are dropped, which leaves `T log(RSS / T)` (or, for the
/// mean-variance scenario, `Σ n_j log σ̂_j²`).
pub fn ssic_score(y: &TimeSeries, cps: &ChangePointSet, scenario: Scenario, alpha: f64) -> Result<ScoredModel> {
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be at least 1, got {alpha}")));
    }
    let fit = fit_segments(y, cps, scenario)?;
    let floor = eps_rss(y.values());
    let t = y.len() as f64;
    let neg2loglik = match scenario {
        Scenario::PcwsConstMeanVar => cps
            .segments()
            .iter()
            .zip(&fit.params)
            .map(|(&(s, e), p)| (e + 1 - s) as f64 * (p[1] * p[1]).max(floor).ln())
            .sum(),
        _ => t * (fit.rss / t).max(floor).ln(),
    };
    let k = n_params(scenario, cps.q());
    Ok(ScoredModel {
        cps: cps.clone(),
        n_params: k,
        neg2loglik,
        ssic: neg2loglik + k as f64 * t.ln().powf(alpha),
        alpha,
    })
}

/// Scores the path models with at most `q_max` change-points, plus the empty
/// model, and returns the best.
pub fn select_on_path(
    y: &TimeSeries,
    path: &SolutionPath,
    scenario: Scenario,
    alpha: f64,
    q_max: usize,
) -> Result<ScoredModel> {
    let mut best = ssic_score(y, &ChangePointSet::empty(y.len()), scenario, alpha)?;
    for (_, cps) in path.small_models(q_max) {
        let cand = ssic_score(y, &cps, scenario, alpha)?;
        if cand.rank(&best) == Ordering::Less {
            best = cand;
        }
    }
    Ok(best)
}

/// Runs the full pipeline for each candidate scenario (same seed for every
/// ensemble) and returns the scenario whose selected model scores lowest.
/// Ties keep the earlier candidate.
pub fn select_scenario(
    y: &TimeSeries,
    scenarios: &[Scenario],
    m: usize,
    seed: u64,
    alpha: f64,
    q_max: usize,
) -> Result<(Scenario, ScoredModel)> {
    let mut best: Option<(Scenario, ScoredModel)> = None;
    for &sc in scenarios {
        let ens = draw_ensemble(y.len(), m, sc, seed)?;
        let path = solution_path(y, &ens, sc)?;
        let model = select_on_path(y, &path, sc, alpha, q_max)?;
        if best.as_ref().is_none_or(|(_, b)| model.ssic < b.ssic) {
            best = Some((sc, model));
        }
    }
    best.ok_or(Error::EmptyInput("candidate scenarios"))
}
