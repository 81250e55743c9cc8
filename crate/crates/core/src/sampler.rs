// SPDX-License-Identifier: MIT OR Apache-2.0

//! Interval ensembles: random draws and a deterministic multiscale grid.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::types::{Interval, Scenario};

/// Recommended ensemble size.
pub const DEFAULT_M: usize = 10_000;

/// Stream used for the interval draw of a standalone ensemble. Replicate `r`
/// of a benchmark uses streams `2r` (noise) and `2r + 1` (intervals).
pub const ENSEMBLE_STREAM: u64 = 1;

/// A ChaCha20 generator on `stream` of `seed`. ChaCha is fully specified, so
/// sequences are identical on every platform.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A fixed family of candidate intervals for one series length and scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalEnsemble {
    pub intervals: Vec<Interval>,
    pub seed: u64,
    pub len: usize,
    pub scenario: Scenario,
}

impl IntervalEnsemble {
    /// Wraps an explicit list, checking every interval against `len` and `scenario`.
    pub fn from_intervals(intervals: Vec<Interval>, len: usize, scenario: Scenario) -> Result<Self> {
        for iv in &intervals {
            Interval::checked(iv.s, iv.e, len, scenario)?;
        }
        Ok(Self { intervals, seed: 0, len, scenario })
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

fn check_feasible(len: usize, scenario: Scenario) -> Result<()> {
    if len <= scenario.min_span() {
        return Err(Error::TooShort { len, what: "no admissible interval exists for the scenario" });
    }
    Ok(())
}

/// Draws `m` intervals uniformly (with replacement) from the admissible pairs.
pub fn draw_ensemble(len: usize, m: usize, scenario: Scenario, seed: u64) -> Result<IntervalEnsemble> {
    let mut rng = stream_rng(seed, ENSEMBLE_STREAM);
    let mut ens = draw_ensemble_with(&mut rng, len, m, scenario)?;
    ens.seed = seed;
    Ok(ens)
}

/// As [`draw_ensemble`] but consuming an existing generator.
///
/// Endpoints are drawn independently and uniformly on `{1, ..., T}` and the
/// pair is rejected until `e - s` reaches the scenario's minimum span.
pub fn draw_ensemble_with<R: Rng>(rng: &mut R, len: usize, m: usize, scenario: Scenario) -> Result<IntervalEnsemble> {
    check_feasible(len, scenario)?;
    if m == 0 {
        return Err(Error::InvalidParameter("ensemble size must be at least 1".into()));
    }
    let min_span = scenario.min_span() as u64;
    let t = len as u64;
    let mut intervals = Vec::with_capacity(m);
    while intervals.len() < m {
        let s = rng.random_range(1..=t);
        let e = rng.random_range(1..=t);
        if e > s && e - s >= min_span {
            intervals.push(Interval { s: s as usize, e: e as usize });
        }
    }
    Ok(IntervalEnsemble { intervals, seed: 0, len, scenario })
}

/// Dyadic multiscale grid: at scale `k` the window is `w = ceil(T / 2^k)`,
/// windows start every `max(1, w / 2)` positions and are clipped to `[1, T]`.
/// Scales continue while `w >= 2d`; inadmissible and repeated windows are
/// dropped, keeping the first occurrence.
pub fn deterministic_grid(len: usize, scenario: Scenario) -> Result<IntervalEnsemble> {
    check_feasible(len, scenario)?;
    let min_w = 2 * scenario.dim();
    let mut seen = std::collections::HashSet::new();
    let mut intervals = Vec::new();
    let mut k = 0u32;
    loop {
        let w = len.div_ceil(1usize << k.min(63));
        if w < min_w {
            break;
        }
        let step = (w / 2).max(1);
        let mut s = 1;
        while s <= len {
            let e = (s + w - 1).min(len);
            if e > s && e - s >= scenario.min_span() && seen.insert((s, e)) {
                intervals.push(Interval { s, e });
            }
            s += step;
        }
        if w == 1 || k >= 63 {
            break;
        }
        k += 1;
    }
    Ok(IntervalEnsemble { intervals, seed: 0, len, scenario })
}
