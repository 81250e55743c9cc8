// SPDX-License-Identifier: MIT OR Apache-2.0

//! The full threshold-indexed solution path.
//!
//! The detection tree at threshold `ζ` is kept in an arena. Raising `ζ` to
//! the smallest node contrast only invalidates the nodes whose contrast no
//! longer exceeds it, and those are rebuilt in place; every other node keeps
//! its interval, because removing candidates cannot dethrone a narrowest
//! survivor.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use crate::contrast::Contrast;
use crate::detector::ScoredEnsemble;
use crate::error::{Error, Result};
use crate::sampler::IntervalEnsemble;
use crate::types::{ChangePointSet, Scenario, TimeSeries};

/// Change between two consecutive path models.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct Step {
    removed: Vec<usize>,
    added: Vec<usize>,
}

/// Piecewise-constant map from thresholds to change-point sets.
///
/// `models()[i]` is the detection result for every `ζ` in
/// `[thresholds[i], thresholds[i + 1])`, and the last model holds up to
/// `end_threshold`, beyond which nothing is detected. Models are stored as
/// differences, since at low thresholds a single model can hold thousands of
/// change-points.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPath {
    len: usize,
    thresholds: Vec<f64>,
    steps: Vec<Step>,
    end_threshold: f64,
}

impl SolutionPath {
    pub fn series_len(&self) -> usize {
        self.len
    }

    /// Number of distinct models.
    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Smallest threshold at which nothing is detected.
    pub fn end_threshold(&self) -> f64 {
        self.end_threshold
    }

    /// Models in threshold order, materialised one at a time.
    pub fn models(&self) -> impl Iterator<Item = ChangePointSet> + '_ {
        let mut current = BTreeSet::new();
        self.steps.iter().map(move |step| {
            for b in &step.removed {
                current.remove(b);
            }
            current.extend(step.added.iter().copied());
            ChangePointSet::new(current.iter().copied().collect(), self.len)
                .expect("path models are valid change-point sets")
        })
    }

    /// `(threshold, model)` for the models with at most `q_max`
    /// change-points, skipping materialisation of the larger ones.
    pub fn small_models(&self, q_max: usize) -> impl Iterator<Item = (f64, ChangePointSet)> + '_ {
        let mut current = BTreeSet::new();
        self.steps.iter().zip(&self.thresholds).filter_map(move |(step, &zeta)| {
            for b in &step.removed {
                current.remove(b);
            }
            current.extend(step.added.iter().copied());
            (current.len() <= q_max).then(|| {
                let cps = ChangePointSet::new(current.iter().copied().collect(), self.len)
                    .expect("path models are valid change-point sets");
                (zeta, cps)
            })
        })
    }

    pub fn model(&self, i: usize) -> Option<ChangePointSet> {
        self.models().nth(i)
    }

    /// Detection result at an arbitrary threshold.
    pub fn model_at(&self, zeta: f64) -> ChangePointSet {
        let k = self.thresholds.partition_point(|&t| t <= zeta);
        if k == 0 || zeta >= self.end_threshold {
            return ChangePointSet::empty(self.len);
        }
        self.model(k - 1).expect("index within path")
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    s: usize,
    e: usize,
    b: usize,
    depth: usize,
    parent: Option<(usize, Side)>,
    children: [Option<usize>; 2],
    alive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left = 0,
    Right = 1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    c: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    // Reversed: BinaryHeap pops the smallest contrast first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.c.total_cmp(&self.c).then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Tree<'a> {
    scored: &'a ScoredEnsemble,
    nodes: Vec<Node>,
    root: Option<usize>,
    heap: BinaryHeap<HeapEntry>,
    removed: Vec<usize>,
    added: Vec<usize>,
}

impl<'a> Tree<'a> {
    fn new(scored: &'a ScoredEnsemble) -> Self {
        Self { scored, nodes: Vec::new(), root: None, heap: BinaryHeap::new(), removed: Vec::new(), added: Vec::new() }
    }

    fn attach(&mut self, slot: Option<(usize, Side)>, node: Option<usize>) {
        match slot {
            None => self.root = node,
            Some((p, side)) => self.nodes[p].children[side as usize] = node,
        }
    }

    /// Grows the subtree for `[s, e]` at threshold `zeta` into `slot`.
    fn build(&mut self, s: usize, e: usize, depth: usize, slot: Option<(usize, Side)>, zeta: f64) {
        let mut work = vec![(s, e, depth, slot)];
        while let Some((s, e, depth, slot)) = work.pop() {
            let found = self.scored.narrowest_over(s, e, zeta);
            let Some(m) = found else {
                self.attach(slot, None);
                continue;
            };
            let it = self.scored.get(m);
            let id = self.nodes.len();
            self.nodes.push(Node { s, e, b: it.b, depth, parent: slot, children: [None, None], alive: true });
            self.attach(slot, Some(id));
            self.heap.push(HeapEntry { c: it.c, node: id });
            self.added.push(it.b);
            work.push((it.b + 1, e, depth + 1, Some((id, Side::Right))));
            work.push((s, it.b, depth + 1, Some((id, Side::Left))));
        }
    }

    fn kill(&mut self, id: usize) {
        let mut work = vec![id];
        while let Some(n) = work.pop() {
            let node = &mut self.nodes[n];
            node.alive = false;
            self.removed.push(node.b);
            work.extend(node.children.iter().flatten());
        }
    }

    /// Smallest contrast among live nodes.
    fn min_c(&mut self) -> Option<f64> {
        while let Some(top) = self.heap.peek() {
            if self.nodes[top.node].alive {
                return Some(top.c);
            }
            self.heap.pop();
        }
        None
    }

    /// Rebuilds every node with `c <= zeta`, shallowest first so that a
    /// rebuilt ancestor supersedes its stale descendants.
    fn update(&mut self, zeta: f64) {
        let mut stale = Vec::new();
        while let Some(top) = self.heap.peek() {
            if top.c > zeta {
                break;
            }
            let top = self.heap.pop().expect("peeked");
            if self.nodes[top.node].alive {
                stale.push(top.node);
            }
        }
        stale.sort_by_key(|&n| (self.nodes[n].depth, n));
        for n in stale {
            if !self.nodes[n].alive {
                continue;
            }
            let Node { s, e, depth, parent, .. } = self.nodes[n];
            self.kill(n);
            self.build(s, e, depth, parent, zeta);
        }
    }

    fn take_step(&mut self) -> Step {
        let mut removed = std::mem::take(&mut self.removed);
        let mut added = std::mem::take(&mut self.added);
        removed.sort_unstable();
        added.sort_unstable();
        Step { removed, added }
    }
}

/// Computes the solution path from precomputed contrast maxima.
pub fn solution_path_scored(scored: &ScoredEnsemble) -> SolutionPath {
    let len = scored.series_len();
    let mut tree = Tree::new(scored);
    tree.build(1, len, 0, None, 0.0);
    let mut thresholds = Vec::new();
    let mut steps: Vec<Step> = Vec::new();
    let mut zeta = 0.0;
    let mut step = tree.take_step();
    while let Some(next) = tree.min_c() {
        // A rebuild can reproduce the same set of change-points; such steps
        // are merged into the earlier threshold.
        if step.removed != step.added {
            thresholds.push(zeta);
            steps.push(step);
        }
        debug_assert!(next > zeta);
        zeta = next;
        tree.update(zeta);
        step = tree.take_step();
    }
    SolutionPath { len, thresholds, steps, end_threshold: zeta }
}

/// Computes the solution path of `y` over `ensemble`.
pub fn solution_path(y: &TimeSeries, ensemble: &IntervalEnsemble, scenario: Scenario) -> Result<SolutionPath> {
    solution_path_with(y, ensemble, Contrast::new(scenario))
}

/// As [`solution_path`] with an explicitly configured contrast.
pub fn solution_path_with(y: &TimeSeries, ensemble: &IntervalEnsemble, contrast: Contrast) -> Result<SolutionPath> {
    if ensemble.scenario != contrast.scenario {
        return Err(Error::InvalidParameter(format!(
            "ensemble drawn for {} but path uses {}",
            ensemble.scenario, contrast.scenario
        )));
    }
    if ensemble.is_empty() {
        return Err(Error::EmptyInput("interval ensemble"));
    }
    let scored = ScoredEnsemble::compute(y.values(), ensemble, contrast)?;
    Ok(solution_path_scored(&scored))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::ScoredInterval;
    use crate::sampler::draw_ensemble;
    use crate::types::Interval;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_series_has_empty_path() {
        let y = TimeSeries::new(vec![0.0; 40]).unwrap();
        let ens = draw_ensemble(40, 100, Scenario::PcwsConstMean, 5).unwrap();
        let p = solution_path(&y, &ens, Scenario::PcwsConstMean).unwrap();
        assert!(p.is_empty());
        assert!(p.model_at(0.0).is_empty());
    }

    #[test]
    fn single_interval_trace() {
        let y: Vec<f64> = (1..=20).map(|t| if t <= 12 { 0.0 } else { 2.0 }).collect();
        let y = TimeSeries::new(y).unwrap();
        let iv = Interval { s: 5, e: 18 };
        let ens = IntervalEnsemble::from_intervals(vec![iv], 20, Scenario::PcwsConstMean).unwrap();
        let best = Contrast::new(Scenario::PcwsConstMean).max(y.values(), iv).unwrap();
        let p = solution_path(&y, &ens, Scenario::PcwsConstMean).unwrap();
        assert_eq!(p.thresholds(), &[0.0]);
        assert_eq!(p.model(0).unwrap().taus(), &[12]);
        assert_eq!(p.end_threshold(), best.value);
    }

    #[test]
    fn matches_direct_detection_on_small_random_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let len = rng.random_range(2..30);
            let m = rng.random_range(1..25);
            let items: Vec<ScoredInterval> = (0..m)
                .map(|_| {
                    let s = rng.random_range(1..len);
                    let e = rng.random_range(s + 1..=len);
                    let b = rng.random_range(s..e);
                    // Coarse values so ties between nodes are common.
                    let c = rng.random_range(0..6) as f64;
                    ScoredInterval { interval: Interval { s, e }, b, c }
                })
                .collect();
            let sc = ScoredEnsemble::from_scored(len, items);
            let p = solution_path_scored(&sc);
            for zeta in (0..14).map(|k| k as f64 * 0.5) {
                assert_eq!(p.model_at(zeta), sc.detect(zeta), "zeta={zeta}");
            }
            let models: Vec<_> = p.models().collect();
            for w in models.windows(2) {
                assert_ne!(w[0], w[1]);
            }
            for w in p.thresholds().windows(2) {
                assert!(w[0] < w[1]);
            }
        }
    }
}
