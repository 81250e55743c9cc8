// SPDX-License-Identifier: MIT OR Apache-2.0

//! Monte-Carlo benchmark: simulate, segment, score.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contrast::Contrast;
use crate::error::{Error, Result};
use crate::fitting::fit_segments;
use crate::metrics::{hausdorff_scaled, mse, QDiffHistogram, RunReport};
use crate::path::solution_path_with;
use crate::sampler::{draw_ensemble_with, stream_rng, DEFAULT_M};
use crate::select::{select_on_path, ScoredModel, DEFAULT_ALPHA, DEFAULT_Q_MAX};
use crate::simulate::{gen_noise_with, gen_signal, observe, ModelId, NoiseKind};
use crate::types::{Scenario, TimeSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub model: ModelId,
    pub noise: NoiseKind,
    /// Candidate scenarios; the best-scoring one is kept per replicate.
    /// Empty means the model's own scenario.
    pub scenarios: Vec<Scenario>,
    pub reps: usize,
    pub m: usize,
    pub seed: u64,
    pub alpha: f64,
    pub q_max: usize,
}

impl BenchConfig {
    pub fn new(model: ModelId, noise: NoiseKind) -> Self {
        Self {
            model,
            noise,
            scenarios: Vec::new(),
            reps: 100,
            m: DEFAULT_M,
            seed: 0,
            alpha: DEFAULT_ALPHA,
            q_max: DEFAULT_Q_MAX,
        }
    }

    fn candidates(&self) -> Vec<Scenario> {
        if self.scenarios.is_empty() {
            vec![gen_signal(self.model).scenario]
        } else {
            self.scenarios.clone()
        }
    }
}

/// Outcome of one simulated data set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replicate {
    pub scenario: Scenario,
    pub model: ScoredModel,
    pub q_diff: i64,
    pub d_h: f64,
    pub mse: f64,
    pub runtime_s: f64,
}

/// Observations of replicate `r`: noise comes from stream `2r` of the seed.
pub fn replicate_data(cfg: &BenchConfig, r: usize) -> Result<Vec<f64>> {
    let signal = gen_signal(cfg.model);
    let noise = gen_noise_with(&mut stream_rng(cfg.seed, 2 * r as u64), cfg.noise, signal.len);
    observe(&signal, &noise)
}

/// Runs replicate `r`. Every candidate scenario draws its intervals from
/// stream `2r + 1`.
pub fn run_replicate(cfg: &BenchConfig, r: usize) -> Result<Replicate> {
    let signal = gen_signal(cfg.model);
    let y = TimeSeries::new(replicate_data(cfg, r)?)?;
    let start = Instant::now();
    let mut best: Option<(Scenario, ScoredModel)> = None;
    for sc in cfg.candidates() {
        let mut rng = stream_rng(cfg.seed, 2 * r as u64 + 1);
        let ens = draw_ensemble_with(&mut rng, y.len(), cfg.m, sc)?;
        let path = solution_path_with(&y, &ens, Contrast::new(sc))?;
        let model = select_on_path(&y, &path, sc, cfg.alpha, cfg.q_max)?;
        if best.as_ref().is_none_or(|(_, b)| model.ssic < b.ssic) {
            best = Some((sc, model));
        }
    }
    let runtime_s = start.elapsed().as_secs_f64();
    let (scenario, model) = best.expect("at least one candidate");
    let fit = fit_segments(&y, &model.cps, scenario)?;
    Ok(Replicate {
        scenario,
        q_diff: model.cps.q() as i64 - signal.true_cps.q() as i64,
        d_h: hausdorff_scaled(&signal.true_cps, &model.cps, signal.len)?,
        mse: mse(&signal.f, &fit.fitted)?,
        runtime_s,
        model,
    })
}

/// Runs all replicates (in parallel; results are combined in replicate order).
pub fn run_bench(cfg: &BenchConfig) -> Result<(RunReport, Vec<Replicate>)> {
    if cfg.reps == 0 {
        return Err(Error::InvalidParameter("at least one replicate is required".into()));
    }
    let reps = (0..cfg.reps).into_par_iter().map(|r| run_replicate(cfg, r)).collect::<Result<Vec<_>>>()?;
    Ok((summarise(cfg, &reps), reps))
}

pub fn summarise(cfg: &BenchConfig, reps: &[Replicate]) -> RunReport {
    let n = reps.len() as f64;
    let mut hist = QDiffHistogram::default();
    for r in reps {
        hist.add(r.q_diff);
    }
    let candidates = cfg.candidates();
    let method = candidates.iter().map(|s| s.name()).collect::<Vec<_>>().join("|");
    RunReport {
        model: cfg.model.name().to_string(),
        noise: match cfg.noise {
            NoiseKind::Gauss { sd } => format!("gauss(sd={sd})"),
            other => other.name().to_string(),
        },
        method,
        replicates: reps.len(),
        q_diff_hist: hist,
        avg_mse: reps.iter().map(|r| r.mse).sum::<f64>() / n,
        avg_dh: reps.iter().map(|r| r.d_h).sum::<f64>() / n,
        avg_runtime_s: reps.iter().map(|r| r.runtime_s).sum::<f64>() / n,
        selected: candidates
            .iter()
            .map(|&s| (s.name().to_string(), reps.iter().filter(|r| r.scenario == s).count()))
            .collect(),
    }
}
