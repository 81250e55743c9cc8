// SPDX-License-Identifier: MIT OR Apache-2.0

//! Narrowest-over-threshold detection at a fixed threshold.

use rayon::prelude::*;

use crate::contrast::{Contrast, DEFAULT_EPS};
use crate::error::{Error, Result};
use crate::sampler::IntervalEnsemble;
use crate::types::{ChangePointSet, Interval, Scenario, TimeSeries};

/// An ensemble member with its contrast maximum `c` attained (first) at `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredInterval {
    pub interval: Interval,
    pub b: usize,
    pub c: f64,
}

/// Contrast maxima of every ensemble interval, computed once and indexed for
/// containment queries.
///
/// An interval's maximum does not depend on which segment is being searched,
/// so both the fixed-threshold recursion and the solution path only ever
/// filter this table.
#[derive(Debug, Clone)]
pub struct ScoredEnsemble {
    len: usize,
    items: Vec<ScoredInterval>,
    /// Ensemble indices ordered by `(s, index)`.
    by_start: Vec<usize>,
    starts: Vec<usize>,
}

impl ScoredEnsemble {
    /// Evaluates every interval's contrast maximum (in parallel, results in
    /// ensemble order).
    pub fn compute(y: &[f64], ensemble: &IntervalEnsemble, contrast: Contrast) -> Result<Self> {
        if y.len() != ensemble.len {
            return Err(Error::LengthMismatch { left: y.len(), right: ensemble.len });
        }
        let items = ensemble
            .intervals
            .par_iter()
            .map(|&iv| contrast.max(y, iv).map(|m| ScoredInterval { interval: iv, b: m.b, c: m.value }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_scored(y.len(), items))
    }

    /// Builds the index over precomputed `(interval, b, c)` triples.
    pub fn from_scored(len: usize, items: Vec<ScoredInterval>) -> Self {
        let mut by_start: Vec<usize> = (0..items.len()).collect();
        by_start.sort_by_key(|&m| (items[m].interval.s, m));
        let starts = by_start.iter().map(|&m| items[m].interval.s).collect();
        Self { len, items, by_start, starts }
    }

    pub fn items(&self) -> &[ScoredInterval] {
        &self.items
    }

    pub fn series_len(&self) -> usize {
        self.len
    }

    pub fn get(&self, m: usize) -> &ScoredInterval {
        &self.items[m]
    }

    /// Index of the shortest interval inside `[s, e]` whose maximum exceeds
    /// `zeta` strictly; ties go to the smallest ensemble index.
    pub fn narrowest_over(&self, s: usize, e: usize, zeta: f64) -> Option<usize> {
        if e <= s {
            return None;
        }
        let from = self.starts.partition_point(|&x| x < s);
        let mut best: Option<(usize, usize)> = None;
        for (&start, &m) in self.starts[from..].iter().zip(&self.by_start[from..]) {
            if start >= e {
                break;
            }
            let it = &self.items[m];
            if it.interval.e > e || it.c <= zeta {
                continue;
            }
            let key = (it.interval.len(), m);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        best.map(|(_, m)| m)
    }

    /// Largest contrast maximum in the table (0 when empty).
    pub fn max_c(&self) -> f64 {
        self.items.iter().map(|it| it.c).fold(0.0, f64::max)
    }

    /// Runs the recursion at threshold `zeta`.
    pub fn detect(&self, zeta: f64) -> ChangePointSet {
        let mut found = Vec::new();
        let mut work = vec![(1usize, self.len)];
        while let Some((s, e)) = work.pop() {
            if e < s + 1 {
                continue;
            }
            let Some(m) = self.narrowest_over(s, e, zeta) else {
                continue;
            };
            let b = self.items[m].b;
            found.push(b);
            work.push((b + 1, e));
            work.push((s, b));
        }
        found.sort_unstable();
        ChangePointSet::new(found, self.len).expect("detected splits are interior and distinct")
    }
}

/// Inputs of a fixed-threshold run.
#[derive(Debug, Clone)]
pub struct DetectionConfig {
    pub threshold: f64,
    pub scenario: Scenario,
    pub ensemble: IntervalEnsemble,
    /// Floor for `log_ε` in the mean-variance contrast.
    pub eps_var: f64,
}

impl DetectionConfig {
    pub fn new(threshold: f64, scenario: Scenario, ensemble: IntervalEnsemble) -> Self {
        Self { threshold, scenario, ensemble, eps_var: DEFAULT_EPS }
    }

    pub fn contrast(&self) -> Contrast {
        Contrast::new(self.scenario).with_eps(self.eps_var)
    }
}

/// Detects change-points in `y` at the configured threshold.
pub fn not_detect(y: &TimeSeries, cfg: &DetectionConfig) -> Result<ChangePointSet> {
    if cfg.threshold.is_nan() || cfg.threshold < 0.0 {
        return Err(Error::InvalidParameter(format!("threshold must be nonnegative, got {}", cfg.threshold)));
    }
    if cfg.ensemble.scenario != cfg.scenario {
        return Err(Error::InvalidParameter(format!(
            "ensemble drawn for {} but detection uses {}",
            cfg.ensemble.scenario, cfg.scenario
        )));
    }
    let scored = ScoredEnsemble::compute(y.values(), &cfg.ensemble, cfg.contrast())?;
    Ok(scored.detect(cfg.threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{deterministic_grid, draw_ensemble};

    fn series(v: Vec<f64>) -> TimeSeries {
        TimeSeries::new(v).unwrap()
    }

    #[test]
    fn empty_ensemble_detects_nothing() {
        let y = series(vec![0.0, 5.0, 0.0, 5.0]);
        let ens = IntervalEnsemble::from_intervals(vec![], 4, Scenario::PcwsConstMean).unwrap();
        let cps = not_detect(&y, &DetectionConfig::new(0.0, Scenario::PcwsConstMean, ens)).unwrap();
        assert!(cps.is_empty());
    }

    #[test]
    fn infinite_threshold_detects_nothing() {
        let y = series((0..50).map(|i| if i < 25 { 0.0 } else { 3.0 }).collect());
        let ens = draw_ensemble(50, 200, Scenario::PcwsConstMean, 3).unwrap();
        let cfg = DetectionConfig::new(f64::INFINITY, Scenario::PcwsConstMean, ens);
        assert!(not_detect(&y, &cfg).unwrap().is_empty());
    }

    #[test]
    fn teeth_like_grid_recovery() {
        let f: Vec<f64> = (1..=24).map(|t| if t <= 8 || t > 16 { 1.0 } else { -1.0 }).collect();
        let y = series(f);
        let ens = deterministic_grid(24, Scenario::PcwsConstMean).unwrap();
        let scored = ScoredEnsemble::compute(y.values(), &ens, Contrast::new(Scenario::PcwsConstMean)).unwrap();
        // Intervals with and without a jump separate cleanly.
        let floor = scored
            .items()
            .iter()
            .filter(|it| !(it.interval.s <= 8 && 8 < it.interval.e) && !(it.interval.s <= 16 && 16 < it.interval.e))
            .map(|it| it.c)
            .fold(0.0, f64::max);
        let ceiling = scored
            .items()
            .iter()
            .filter(|it| (it.interval.s <= 8 && 8 < it.interval.e) || (it.interval.s <= 16 && 16 < it.interval.e))
            .map(|it| it.c)
            .fold(f64::INFINITY, f64::min);
        assert!(floor < ceiling);
        for frac in [0.01, 0.5, 0.99] {
            let zeta = floor + frac * (ceiling - floor);
            let cfg = DetectionConfig::new(zeta, Scenario::PcwsConstMean, ens.clone());
            assert_eq!(not_detect(&y, &cfg).unwrap().taus(), &[8, 16]);
        }
    }

    #[test]
    fn narrowest_prefers_smallest_index_on_ties() {
        let items = vec![
            ScoredInterval { interval: Interval { s: 1, e: 10 }, b: 5, c: 3.0 },
            ScoredInterval { interval: Interval { s: 4, e: 6 }, b: 4, c: 2.0 },
            ScoredInterval { interval: Interval { s: 2, e: 4 }, b: 3, c: 2.0 },
            ScoredInterval { interval: Interval { s: 7, e: 9 }, b: 8, c: 0.5 },
        ];
        let sc = ScoredEnsemble::from_scored(10, items);
        assert_eq!(sc.narrowest_over(1, 10, 1.0), Some(1));
        assert_eq!(sc.narrowest_over(1, 10, 2.0), Some(0));
        assert_eq!(sc.narrowest_over(5, 10, 0.0), Some(3));
        assert_eq!(sc.narrowest_over(5, 10, 3.0), None);
        assert_eq!(sc.detect(1.0).taus(), &[3, 4]);
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let y = series(vec![0.0; 20]);
        let ens = draw_ensemble(30, 10, Scenario::PcwsConstMean, 1).unwrap();
        let cfg = DetectionConfig::new(1.0, Scenario::PcwsConstMean, ens);
        assert!(not_detect(&y, &cfg).is_err());
        let ens = draw_ensemble(20, 10, Scenario::PcwsLinMean, 1).unwrap();
        let cfg = DetectionConfig::new(1.0, Scenario::PcwsConstMean, ens.clone());
        assert!(not_detect(&y, &cfg).is_err());
        let cfg = DetectionConfig::new(-1.0, Scenario::PcwsLinMean, ens);
        assert!(not_detect(&y, &cfg).is_err());
    }
}
