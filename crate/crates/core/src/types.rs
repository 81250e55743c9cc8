// SPDX-License-Identifier: MIT OR Apache-2.0

//! Domain types shared by every stage of the pipeline.
//!
//! All indices exposed by this module are 1-based and inclusive, so an
//! [`Interval`] `[s, e]` covers observations `y[s - 1..e]` of the underlying
//! slice. A change-point `tau` is the *last* index of the segment it closes.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An immutable, finite univariate series with an optional known noise scale.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    sigma0: Option<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { values, sigma0: None })
    }

    /// Attaches a known noise standard deviation.
    pub fn with_sigma(mut self, sigma0: f64) -> Result<Self> {
        if !(sigma0.is_finite() && sigma0 > 0.0) {
            return Err(Error::InvalidSigma(sigma0));
        }
        self.sigma0 = Some(sigma0);
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sigma0(&self) -> Option<f64> {
        self.sigma0
    }

    /// Returns a copy with every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut out = TimeSeries::new(self.values.iter().map(|v| v * factor).collect())?;
        out.sigma0 = self.sigma0.map(|s| s * factor.abs()).filter(|s| *s > 0.0);
        Ok(out)
    }
}

/// The kind of generalised change-point being searched for.
///
/// Each scenario fixes the per-segment parameter dimension `d` and the
/// contrast function used to test an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scenario {
    /// Piecewise-constant mean, constant variance (jumps).
    #[serde(rename = "pcws-const")]
    PcwsConstMean,
    /// Continuous piecewise-linear mean (kinks).
    #[serde(rename = "pcws-lin-cont")]
    PcwsLinContMean,
    /// Piecewise-linear mean, possibly discontinuous.
    #[serde(rename = "pcws-lin")]
    PcwsLinMean,
    /// Piecewise-constant mean and variance.
    #[serde(rename = "mean-var")]
    PcwsConstMeanVar,
    /// Piecewise-quadratic mean.
    #[serde(rename = "pcws-quad")]
    PcwsQuadMean,
    /// Piecewise-constant mean, sign-based contrast for heavy-tailed noise.
    #[serde(rename = "pcws-const-ht")]
    PcwsConstMeanHt,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::PcwsConstMean,
        Scenario::PcwsLinContMean,
        Scenario::PcwsLinMean,
        Scenario::PcwsConstMeanVar,
        Scenario::PcwsQuadMean,
        Scenario::PcwsConstMeanHt,
    ];

    /// Per-segment parameter dimension `d`.
    pub fn dim(self) -> usize {
        match self {
            Scenario::PcwsConstMean | Scenario::PcwsConstMeanHt => 1,
            Scenario::PcwsLinContMean | Scenario::PcwsLinMean | Scenario::PcwsConstMeanVar => 2,
            Scenario::PcwsQuadMean => 3,
        }
    }

    /// Smallest `e - s` for which [`admissible_b_range`] is nonempty.
    ///
    /// This is `2(d - 1) + 1` except for the mean-variance contrast, whose
    /// split range `{s+2, ..., e-2}` needs one extra observation.
    pub fn min_span(self) -> usize {
        match self {
            Scenario::PcwsConstMeanVar => 4,
            other => 2 * (other.dim() - 1) + 1,
        }
    }

    /// Canonical command-line name.
    pub fn name(self) -> &'static str {
        match self {
            Scenario::PcwsConstMean => "pcws-const",
            Scenario::PcwsLinContMean => "pcws-lin-cont",
            Scenario::PcwsLinMean => "pcws-lin",
            Scenario::PcwsConstMeanVar => "mean-var",
            Scenario::PcwsQuadMean => "pcws-quad",
            Scenario::PcwsConstMeanHt => "pcws-const-ht",
        }
    }

    /// Whether the contrast scales linearly with the data (so that a
    /// threshold is expressed in units of the noise standard deviation).
    pub fn is_scale_equivariant(self) -> bool {
        !matches!(self, Scenario::PcwsConstMeanVar | Scenario::PcwsConstMeanHt)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL.into_iter().find(|sc| sc.name() == s).ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

/// A candidate subsample `[s, e]`, 1-based and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub s: usize,
    pub e: usize,
}

impl Interval {
    /// Builds an interval with `1 <= s < e`.
    pub fn new(s: usize, e: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidInterval { s, e, reason: "indices are 1-based" });
        }
        if s >= e {
            return Err(Error::InvalidInterval { s, e, reason: "requires s < e" });
        }
        Ok(Self { s, e })
    }

    /// Builds an interval and checks it against a series length and scenario.
    pub fn checked(s: usize, e: usize, len: usize, scenario: Scenario) -> Result<Self> {
        let iv = Self::new(s, e)?;
        if e > len {
            return Err(Error::InvalidInterval { s, e, reason: "end exceeds series length" });
        }
        if !iv.admits(scenario) {
            return Err(Error::InvalidInterval { s, e, reason: "too short for the scenario" });
        }
        Ok(iv)
    }

    /// Number of observations `e - s + 1`.
    pub fn len(&self) -> usize {
        self.e - self.s + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True when the interval is long enough to host a split for `scenario`.
    pub fn admits(&self, scenario: Scenario) -> bool {
        self.e - self.s >= scenario.min_span()
    }

    /// Non-strict containment `self ⊆ outer`.
    pub fn within(&self, s: usize, e: usize) -> bool {
        self.s >= s && self.e <= e
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.s, self.e)
    }
}

/// Split points `b` at which the scenario's contrast is evaluated on `iv`.
///
/// Jump-type scenarios use `{s+d-1, ..., e-d}`. The continuous-kink contrast
/// is defined for every interior kink location `{s+1, ..., e-1}`, and the
/// mean-variance contrast for `{s+2, ..., e-2}`.
pub fn admissible_b_range(iv: Interval, scenario: Scenario) -> Result<RangeInclusive<usize>> {
    if !iv.admits(scenario) {
        return Err(Error::InvalidInterval { s: iv.s, e: iv.e, reason: "too short for the scenario" });
    }
    let (lo, hi) = match scenario {
        Scenario::PcwsLinContMean => (iv.s + 1, iv.e - 1),
        Scenario::PcwsConstMeanVar => (iv.s + 2, iv.e - 2),
        other => {
            let d = other.dim();
            (iv.s + d - 1, iv.e - d)
        }
    };
    debug_assert!(lo <= hi);
    Ok(lo..=hi)
}

/// Returns the id attached to the smallest key, preferring the smallest id
/// among ties.
pub fn break_ties_min<K, I, It>(candidates: It) -> Result<I>
where
    K: PartialOrd,
    I: Ord,
    It: IntoIterator<Item = (K, I)>,
{
    let mut best: Option<(K, I)> = None;
    for (key, id) in candidates {
        let replace = match &best {
            None => true,
            Some((bk, bid)) => key < *bk || (key == *bk && id < *bid),
        };
        if replace {
            best = Some((key, id));
        }
    }
    best.map(|(_, id)| id).ok_or(Error::EmptyInput("no candidates to choose from"))
}

/// Sorted, unique change-point locations for a series of length `len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChangePointSet {
    taus: Vec<usize>,
    len: usize,
}

impl ChangePointSet {
    /// Validates that `taus` is strictly increasing and within `[1, len - 1]`.
    pub fn new(taus: Vec<usize>, len: usize) -> Result<Self> {
        if let Some(w) = taus.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidChangePoints(format!("not strictly increasing at {} >= {}", w[0], w[1])));
        }
        if let (Some(&first), Some(&last)) = (taus.first(), taus.last()) {
            if first == 0 || last >= len {
                return Err(Error::InvalidChangePoints(format!(
                    "locations must lie in [1, {}]",
                    len.saturating_sub(1)
                )));
            }
        }
        Ok(Self { taus, len })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(mut taus: Vec<usize>, len: usize) -> Result<Self> {
        taus.sort_unstable();
        taus.dedup();
        Self::new(taus, len)
    }

    pub fn empty(len: usize) -> Self {
        Self { taus: Vec::new(), len }
    }

    pub fn taus(&self) -> &[usize] {
        &self.taus
    }

    /// Number of change-points `q`.
    pub fn q(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// Length of the series the set refers to.
    pub fn series_len(&self) -> usize {
        self.len
    }

    /// Segment bounds `(start, end)` (1-based, inclusive) delimited by the set.
    pub fn segments(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.taus.len() + 1);
        let mut start = 1;
        for &tau in &self.taus {
            out.push((start, tau));
            start = tau + 1;
        }
        out.push((start, self.len));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(TimeSeries::new(vec![1.0, f64::NAN]), Err(Error::NonFinite { index: 1, .. })));
        assert!(TimeSeries::new(vec![f64::INFINITY]).is_err());
        assert_eq!(TimeSeries::new(vec![]), Err(Error::EmptySeries));
        assert!(TimeSeries::new(vec![1.0]).unwrap().with_sigma(0.0).is_err());
    }

    #[test]
    fn b_range_examples() {
        let r = |s, e, sc| admissible_b_range(Interval::new(s, e).unwrap(), sc).unwrap();
        assert_eq!(r(1, 4, Scenario::PcwsConstMean), 1..=3);
        assert_eq!(r(1, 6, Scenario::PcwsLinMean), 2..=4);
        assert_eq!(r(1, 6, Scenario::PcwsLinContMean), 2..=5);
        assert_eq!(r(1, 8, Scenario::PcwsConstMeanVar), 3..=6);
        assert_eq!(r(1, 6, Scenario::PcwsQuadMean), 3..=3);
    }

    #[test]
    fn b_range_rejects_short() {
        let iv = Interval::new(1, 3).unwrap();
        assert!(admissible_b_range(iv, Scenario::PcwsLinMean).is_err());
        assert!(admissible_b_range(Interval::new(1, 4).unwrap(), Scenario::PcwsConstMeanVar).is_err());
        assert!(admissible_b_range(Interval::new(2, 6).unwrap(), Scenario::PcwsQuadMean).is_err());
        assert!(Interval::new(3, 3).is_err());
        assert!(Interval::new(0, 3).is_err());
        assert!(Interval::checked(1, 9, 8, Scenario::PcwsConstMean).is_err());
    }

    #[test]
    fn tie_breaking() {
        assert_eq!(break_ties_min([(5, 2), (5, 1), (7, 3)]).unwrap(), 1);
        assert_eq!(break_ties_min([(3, 9)]).unwrap(), 9);
        assert_eq!(break_ties_min([(2, 4), (1, 8), (1, 6)]).unwrap(), 6);
        assert!(break_ties_min(Vec::<(i32, i32)>::new()).is_err());
    }

    #[test]
    fn scenario_names_round_trip() {
        for sc in Scenario::ALL {
            assert_eq!(sc.name().parse::<Scenario>().unwrap(), sc);
            let json = serde_json::to_string(&sc).unwrap();
            assert_eq!(json, format!("\"{}\"", sc.name()));
        }
        assert!("pcws".parse::<Scenario>().is_err());
    }

    #[test]
    fn change_point_set_validation() {
        assert!(ChangePointSet::new(vec![3, 2], 10).is_err());
        assert!(ChangePointSet::new(vec![0], 10).is_err());
        assert!(ChangePointSet::new(vec![10], 10).is_err());
        let cps = ChangePointSet::from_unsorted(vec![5, 2, 5], 10).unwrap();
        assert_eq!(cps.taus(), &[2, 5]);
        assert_eq!(cps.segments(), vec![(1, 2), (3, 5), (6, 10)]);
    }

    proptest! {
        #[test]
        fn b_range_inside_interval(s in 1usize..50, w in 1usize..50, k in 0usize..6) {
            let sc = Scenario::ALL[k];
            let iv = Interval::new(s, s + w).unwrap();
            match admissible_b_range(iv, sc) {
                Ok(r) => {
                    prop_assert!(*r.start() >= iv.s && *r.end() < iv.e);
                    prop_assert!(r.start() <= r.end());
                }
                Err(_) => prop_assert!(w < sc.min_span()),
            }
        }

        #[test]
        fn b_range_reflection(s in 1usize..50, w in 1usize..50) {
            let iv = Interval::new(s, s + w).unwrap();
            // Jumps sit between b and b+1; kinks sit at b itself.
            let jump = admissible_b_range(iv, Scenario::PcwsConstMean).unwrap();
            for b in jump.clone() {
                prop_assert!(jump.contains(&(iv.s + iv.e - 1 - b)));
            }
            if let Ok(kink) = admissible_b_range(iv, Scenario::PcwsLinContMean) {
                for b in kink.clone() {
                    prop_assert!(kink.contains(&(iv.s + iv.e - b)));
                }
            }
        }

        #[test]
        fn tie_breaking_is_order_insensitive(mut v in prop::collection::vec((0u8..4, 0u32..1000), 1..20)) {
            let a = break_ties_min(v.clone()).unwrap();
            v.reverse();
            let b = break_ties_min(v.clone()).unwrap();
            v.sort_by_key(|p| p.1 % 7);
            let c = break_ties_min(v).unwrap();
            prop_assert_eq!(a, b);
            prop_assert_eq!(a, c);
        }
    }
}
