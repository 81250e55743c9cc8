// SPDX-License-Identifier: MIT OR Apache-2.0

//! Contrast functions `C(s, e, b)` for every supported scenario.
//!
//! A contrast measures the evidence for a single feature at split `b` inside
//! `[s, e]`; its square equals the generalised log-likelihood ratio scaled by
//! the noise variance. Each routine evaluates every admissible `b` of one
//! interval in `O(e - s)` time from running sums over the interval.
//!
//! Running sums are accumulated in interval-local coordinates: `u = t - s`
//! from the left end and `v = e - t` from the right end. Data are centred by
//! the interval mean first for the contrasts that are invariant to it, which
//! keeps the sums small without changing the result.

use crate::error::Result;
use crate::types::{admissible_b_range, Interval, Scenario, TimeSeries};

/// Default floor for `log_ε` in the mean-variance contrast.
pub const DEFAULT_EPS: f64 = 1e-10;

/// Absolute slack allowed below zero in a squared contrast before it is
/// treated as an error rather than rounding noise (scaled by the size of the
/// terms involved).
const RADICAND_SLACK: f64 = 1e-9;

/// The contrast evaluated at every admissible split of one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastProfile {
    pub interval: Interval,
    /// First admissible split; `values[i]` is the contrast at `first_b + i`.
    pub first_b: usize,
    pub values: Vec<f64>,
    /// Smallest maximiser.
    pub best_b: usize,
    pub best_value: f64,
}

impl ContrastProfile {
    pub fn value_at(&self, b: usize) -> Option<f64> {
        b.checked_sub(self.first_b).and_then(|i| self.values.get(i)).copied()
    }

    /// Iterator over `(b, value)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.first_b + i, v))
    }
}

/// Maximum of a profile and its smallest maximiser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrastMax {
    pub b: usize,
    pub value: f64,
}

/// A scenario's contrast with its tuning constants.
///
/// This is the extension seam of the library: everything downstream of the
/// contrast (detection, the solution path) only needs [`Contrast::max`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contrast {
    pub scenario: Scenario,
    /// Floor for `log_ε`; only used by [`Scenario::PcwsConstMeanVar`].
    pub eps: f64,
}

impl Contrast {
    pub fn new(scenario: Scenario) -> Self {
        Self { scenario, eps: DEFAULT_EPS }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    /// Full profile on `iv`; `y` is the whole series (1-based `iv`).
    pub fn profile(&self, y: &[f64], iv: Interval) -> Result<ContrastProfile> {
        let range = admissible_b_range(iv, self.scenario)?;
        let first_b = *range.start();
        let mut values = Vec::with_capacity(range.end() - first_b + 1);
        let mut best = Best::default();
        self.visit(y, iv, |b, v| {
            values.push(v);
            best.offer(b, v);
        });
        debug_assert_eq!(values.len(), range.end() - first_b + 1);
        Ok(ContrastProfile { interval: iv, first_b, values, best_b: best.b, best_value: best.value })
    }

    /// Maximum over the profile without materialising it.
    pub fn max(&self, y: &[f64], iv: Interval) -> Result<ContrastMax> {
        admissible_b_range(iv, self.scenario)?;
        let mut best = Best::default();
        self.visit(y, iv, |b, v| best.offer(b, v));
        Ok(ContrastMax { b: best.b, value: best.value })
    }

    fn visit(&self, y: &[f64], iv: Interval, sink: impl FnMut(usize, f64)) {
        let x = &y[iv.s - 1..iv.e];
        match self.scenario {
            Scenario::PcwsConstMean => const_mean(x, iv.s, sink),
            Scenario::PcwsConstMeanHt => const_mean_ht(x, iv.s, sink),
            Scenario::PcwsLinContMean => lin_cont(x, iv.s, sink),
            Scenario::PcwsLinMean => polynomial(x, iv.s, 1, sink),
            Scenario::PcwsQuadMean => polynomial(x, iv.s, 2, sink),
            Scenario::PcwsConstMeanVar => mean_var(x, iv.s, self.eps, sink),
        }
    }
}

#[derive(Debug)]
struct Best {
    b: usize,
    value: f64,
}

impl Default for Best {
    fn default() -> Self {
        Self { b: 0, value: f64::NEG_INFINITY }
    }
}

impl Best {
    #[inline]
    fn offer(&mut self, b: usize, v: f64) {
        if v > self.value {
            self.b = b;
            self.value = v;
        }
    }
}

/// CUSUM contrast for piecewise-constant means.
pub fn contrast_pcws_const(y: &TimeSeries, iv: Interval) -> Result<ContrastProfile> {
    Contrast::new(Scenario::PcwsConstMean).profile(y.values(), iv)
}

/// Kink contrast for continuous piecewise-linear means.
pub fn contrast_pcws_lin_cont(y: &TimeSeries, iv: Interval) -> Result<ContrastProfile> {
    Contrast::new(Scenario::PcwsLinContMean).profile(y.values(), iv)
}

/// Jump-plus-kink contrast for discontinuous piecewise-linear means.
pub fn contrast_pcws_lin(y: &TimeSeries, iv: Interval) -> Result<ContrastProfile> {
    Contrast::new(Scenario::PcwsLinMean).profile(y.values(), iv)
}

/// Log-scale likelihood-ratio contrast for simultaneous mean and variance changes.
pub fn contrast_mean_var(y: &TimeSeries, iv: Interval, eps: f64) -> Result<ContrastProfile> {
    Contrast::new(Scenario::PcwsConstMeanVar).with_eps(eps).profile(y.values(), iv)
}

/// Likelihood-ratio contrast for piecewise-quadratic means.
pub fn contrast_pcws_quad(y: &TimeSeries, iv: Interval) -> Result<ContrastProfile> {
    Contrast::new(Scenario::PcwsQuadMean).profile(y.values(), iv)
}

/// CUSUM of the residual signs, for heavy-tailed noise.
pub fn contrast_ht(y: &TimeSeries, iv: Interval) -> Result<ContrastProfile> {
    Contrast::new(Scenario::PcwsConstMeanHt).profile(y.values(), iv)
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

#[inline]
fn cusum(left: f64, right: f64, n1: f64, n2: f64, l: f64) -> f64 {
    (n2 / (l * n1)).sqrt() * left - (n1 / (l * n2)).sqrt() * right
}

fn const_mean(x: &[f64], s: usize, mut sink: impl FnMut(usize, f64)) {
    let l = x.len();
    let m = mean(x);
    let total: f64 = x.iter().map(|v| v - m).sum();
    let lf = l as f64;
    let mut left = 0.0;
    for (k, &v) in x[..l - 1].iter().enumerate() {
        left += v - m;
        let n1 = (k + 1) as f64;
        sink(s + k, cusum(left, total - left, n1, lf - n1, lf).abs());
    }
}

fn const_mean_ht(x: &[f64], s: usize, mut sink: impl FnMut(usize, f64)) {
    let l = x.len();
    let m = mean(x);
    let sign = |v: f64| {
        let r = v - m;
        if r > 0.0 {
            1.0
        } else if r < 0.0 {
            -1.0
        } else {
            0.0
        }
    };
    // Sums of signs are small integers, so these are exact.
    let total: f64 = x.iter().map(|&v| sign(v)).sum();
    let lf = l as f64;
    let mut left = 0.0;
    for (k, &v) in x[..l - 1].iter().enumerate() {
        left += sign(v);
        let n1 = (k + 1) as f64;
        sink(s + k, cusum(left, total - left, n1, lf - n1, lf).abs());
    }
}

/// Sums `Σ w^k x_w`, `k = 0, 1, 2`, over a run of observations in local
/// coordinates `w = 0, 1, ...` counted from one end of the run.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    m0: f64,
    m1: f64,
    m2: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, x: f64) {
        let w = self.n;
        self.m0 += x;
        self.m1 += w * x;
        self.m2 += w * w * x;
        self.n += 1.0;
    }

    /// Coordinate on the unit-norm centred linear vector of the run.
    #[inline]
    fn linear(&self) -> f64 {
        let n = self.n;
        let c = (n - 1.0) / 2.0;
        (self.m1 - c * self.m0) / (n * (n * n - 1.0) / 12.0).sqrt()
    }

    /// Coordinate on the unit-norm discrete orthogonal quadratic of the run.
    #[inline]
    fn quadratic(&self) -> f64 {
        let n = self.n;
        let c = (n - 1.0) / 2.0;
        let raw = self.m2 - 2.0 * c * self.m1 + (c * c - (n * n - 1.0) / 12.0) * self.m0;
        raw / (n * (n * n - 1.0) * (n * n - 4.0) / 180.0).sqrt()
    }
}

/// Suffix moments: `out[k]` describes `x[k..]` in coordinates `v` counted
/// back from the last element.
fn suffix_moments(x: &[f64]) -> Vec<Moments> {
    let mut out = vec![Moments::default(); x.len() + 1];
    let mut acc = Moments::default();
    for k in (0..x.len()).rev() {
        acc.push(x[k]);
        out[k] = acc;
    }
    out
}

fn lin_cont(x: &[f64], s: usize, mut sink: impl FnMut(usize, f64)) {
    let l = x.len();
    let m = mean(x);
    let xc: Vec<f64> = x.iter().map(|v| v - m).collect();
    let suffix = suffix_moments(&xc);
    let lf = l as f64;
    let mut left = Moments::default();
    left.push(xc[0]);
    // b = s + k for k = 1..=l-2; the left run is xc[..=k], the right run xc[k+1..].
    for k in 1..l - 1 {
        left.push(xc[k]);
        let right = &suffix[k + 1];
        let n1 = (k + 1) as f64;
        let n2 = lf - n1;
        let alpha = (6.0 / (lf * (lf * lf - 1.0) * (1.0 + (n2 + 1.0) * n1 + n2 * (n1 - 1.0)))).sqrt();
        let beta = ((n2 + 1.0) * n2 / ((n1 - 1.0) * n1)).sqrt();
        let a_left = 3.0 * n1 + n2 - 1.0;
        let a_right = 3.0 * n2 + n1 + 1.0;
        let left_part = a_left * left.m1 - (lf - 1.0) * (n1 - 1.0) * left.m0;
        let right_part = (lf - 1.0) * n2 * right.m0 - a_right * right.m1;
        let ip = alpha * beta * left_part - (alpha / beta) * right_part;
        sink(s + k, ip.abs());
    }
}

/// Jump-plus-kink (`degree = 1`) and piecewise-quadratic (`degree = 2`)
/// contrasts, as the square root of the drop in residual sum of squares
/// between one polynomial fit on `[s, e]` and separate fits on `[s, b]` and
/// `[b+1, e]`. Both sides are expanded in orthonormal polynomial bases, so
/// the drop is a signed sum of squared projections.
fn polynomial(x: &[f64], s: usize, degree: usize, mut sink: impl FnMut(usize, f64)) {
    let l = x.len();
    let m = mean(x);
    let xc: Vec<f64> = x.iter().map(|v| v - m).collect();
    let suffix = suffix_moments(&xc);
    let whole = suffix[0];
    let lf = l as f64;
    let min_side = degree + 1;
    let whole_lin = whole.linear();
    let whole_quad = if degree >= 2 { whole.quadratic() } else { 0.0 };

    let mut left = Moments::default();
    for &v in &xc[..min_side - 1] {
        left.push(v);
    }
    for k in (min_side - 1)..(l - min_side) {
        left.push(xc[k]);
        let right = &suffix[k + 1];
        let n1 = left.n;
        let n2 = lf - n1;
        let psi = cusum(left.m0, right.m0, n1, n2, lf);
        let (gl, gr) = (left.linear(), right.linear());
        let mut plus = psi * psi + gl * gl + gr * gr;
        let mut minus = whole_lin * whole_lin;
        if degree >= 2 {
            let (ql, qr) = (left.quadratic(), right.quadratic());
            plus += ql * ql + qr * qr;
            minus += whole_quad * whole_quad;
        }
        let radicand = plus - minus;
        debug_assert!(
            radicand >= -RADICAND_SLACK * (1.0 + plus + minus),
            "negative squared contrast {radicand} at b = {}",
            s + k
        );
        sink(s + k, radicand.max(0.0).sqrt());
    }
}

#[inline]
fn log_eps(sd: f64, eps: f64) -> f64 {
    sd.max(eps).ln()
}

fn mean_var(x: &[f64], s: usize, eps: f64, mut sink: impl FnMut(usize, f64)) {
    let l = x.len();
    let m = mean(x);
    let xc: Vec<f64> = x.iter().map(|v| v - m).collect();
    let (total, total_sq) = xc.iter().fold((0.0, 0.0), |(a, b), v| (a + v, b + v * v));
    let sd = |sum: f64, sum_sq: f64, n: f64| {
        let mu = sum / n;
        (sum_sq / n - mu * mu).max(0.0).sqrt()
    };
    let lf = l as f64;
    let log_whole = log_eps(sd(total, total_sq, lf), eps);

    // Right-hand sums accumulated from the end to avoid subtracting from totals.
    let mut suffix = vec![(0.0, 0.0); l + 1];
    for k in (0..l).rev() {
        suffix[k] = (suffix[k + 1].0 + xc[k], suffix[k + 1].1 + xc[k] * xc[k]);
    }
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for (k, &v) in xc[..l - 2].iter().enumerate() {
        sum += v;
        sum_sq += v * v;
        if k < 2 {
            continue;
        }
        let n1 = (k + 1) as f64;
        let n2 = lf - n1;
        let (rs, rss) = suffix[k + 1];
        let log_left = log_eps(sd(sum, sum_sq, n1), eps);
        let log_right = log_eps(sd(rs, rss, n2), eps);
        // l·log σ − n1·log σ1 − n2·log σ2 with l = n1 + n2, grouped so that
        // equal floors cancel exactly.
        let value = n1 * (log_whole - log_left) + n2 * (log_whole - log_right);
        sink(s + k, value.max(0.0));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{dot, gamma_vector, phi_vector, psi_vector};
    use proptest::prelude::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    fn iv(s: usize, e: usize) -> Interval {
        Interval::new(s, e).unwrap()
    }

    #[test]
    fn cusum_constant_is_zero() {
        let p = contrast_pcws_const(&ts(&[3.5; 4]), iv(1, 4)).unwrap();
        assert_eq!(p.values.len(), 3);
        assert!(p.values.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn cusum_hand_example() {
        let p = contrast_pcws_const(&ts(&[0.0, 0.0, 1.0, 1.0]), iv(1, 4)).unwrap();
        assert!((p.value_at(2).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(p.best_b, 2);
    }

    #[test]
    fn cusum_matches_psi_inner_product() {
        let y = [0.3, -1.2, 2.5, 0.7, 4.1, -0.2, 1.9, 0.0];
        let p = contrast_pcws_const(&ts(&y), iv(2, 7)).unwrap();
        for (b, v) in p.iter() {
            let naive = dot(&y, &psi_vector(8, 2, 7, b)).abs();
            assert!((v - naive).abs() < 1e-12 * (1.0 + naive));
        }
    }

    #[test]
    fn kink_affine_is_zero() {
        let y: Vec<f64> = (1..=20).map(|t| 3.0 - 0.25 * t as f64).collect();
        let p = contrast_pcws_lin_cont(&ts(&y), iv(3, 18)).unwrap();
        assert!(p.values.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn kink_matches_phi_inner_product() {
        let y = [0.3, -1.2, 2.5, 0.7, 4.1, -0.2, 1.9, 0.0, 1.1];
        let p = contrast_pcws_lin_cont(&ts(&y), iv(2, 8)).unwrap();
        assert_eq!(p.first_b, 3);
        assert_eq!(p.values.len(), 5);
        for (b, v) in p.iter() {
            let naive = dot(&y, &phi_vector(9, 2, 8, b)).abs();
            assert!((v - naive).abs() < 1e-12 * (1.0 + naive), "b={b}: {v} vs {naive}");
        }
    }

    #[test]
    fn triangle_kink_splits_in_the_middle() {
        let y: Vec<f64> = (1..=1000)
            .map(|t| {
                let t = t as f64;
                if t <= 350.0 {
                    t / 350.0
                } else if t <= 650.0 {
                    1.0
                } else {
                    1001.0 / 350.0 - t / 350.0
                }
            })
            .collect();
        let p = contrast_pcws_lin_cont(&ts(&y), iv(1, 1000)).unwrap();
        assert!((p.best_b as i64 - 500).abs() <= 2, "best_b = {}", p.best_b);
    }

    #[test]
    fn single_kink_recovered_exactly() {
        let tau = 37;
        let y: Vec<f64> =
            (1..=80).map(|t| 1.0 + 0.1 * t as f64 + if t > tau { -0.3 * (t - tau) as f64 } else { 0.0 }).collect();
        let p = contrast_pcws_lin_cont(&ts(&y), iv(5, 70)).unwrap();
        assert_eq!(p.best_b, tau);
    }

    #[test]
    fn lin_affine_is_zero_and_step_example() {
        let y: Vec<f64> = (1..=12).map(|t| -2.0 + 0.7 * t as f64).collect();
        let p = contrast_pcws_lin(&ts(&y), iv(1, 12)).unwrap();
        assert!(p.values.iter().all(|v| v.abs() < 1e-6));

        let y = [0.0, 0.0, 0.0, 0.0, 5.0, 5.0, 5.0, 5.0];
        let p = contrast_pcws_lin(&ts(&y), iv(1, 8)).unwrap();
        // Halves are flat but the whole interval is not: the jump term 50 is
        // offset by the trend of the full interval, 40^2 / 42.
        let expected = (50.0f64 - 1600.0 / 42.0).sqrt();
        assert!((p.value_at(4).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn lin_matches_projection_formula() {
        let y = [0.3, -1.2, 2.5, 0.7, 4.1, -0.2, 1.9, 0.0, 1.1, 2.2];
        let (s, e) = (2, 10);
        let p = contrast_pcws_lin(&ts(&y), iv(s, e)).unwrap();
        for (b, v) in p.iter() {
            let r = dot(&y, &psi_vector(10, s, e, b)).powi(2)
                + dot(&y, &gamma_vector(10, s, b)).powi(2)
                + dot(&y, &gamma_vector(10, b + 1, e)).powi(2)
                - dot(&y, &gamma_vector(10, s, e)).powi(2);
            assert!((v - r.max(0.0).sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn mean_var_constant_is_zero() {
        let p = contrast_mean_var(&ts(&[0.1; 9]), iv(1, 9), DEFAULT_EPS).unwrap();
        assert_eq!(p.first_b, 3);
        assert_eq!(p.values.len(), 5);
        assert!(p.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mean_var_floors_degenerate_segments() {
        let y = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 10.0, 10.0];
        let p = contrast_mean_var(&ts(&y), iv(1, 8), 1e-10).unwrap();
        let at6 = p.value_at(6).unwrap();
        for b in 3..=5 {
            assert!(at6 > p.value_at(b).unwrap());
        }
        assert_eq!(p.best_b, 6);
    }

    #[test]
    fn quad_exact_is_zero() {
        let y: Vec<f64> = (1..=30)
            .map(|t| {
                let t = t as f64;
                1.0 - 0.2 * t + 0.03 * t * t
            })
            .collect();
        let p = contrast_pcws_quad(&ts(&y), iv(1, 30)).unwrap();
        assert!(p.values.iter().all(|v| v.abs() < 1e-5), "{:?}", p.values);
    }

    #[test]
    fn ht_examples() {
        let p = contrast_ht(&ts(&[2.0; 5]), iv(1, 5)).unwrap();
        assert!(p.values.iter().all(|&v| v == 0.0));

        let p = contrast_ht(&ts(&[-3.0, -1.0, 2.0, 100.0]), iv(1, 4)).unwrap();
        let expected = (1.0f64 / 12.0).sqrt() * 3.0 + 0.75f64.sqrt();
        assert!((p.value_at(3).unwrap() - expected).abs() < 1e-12);
        assert!((p.value_at(3).unwrap() - 1.7321).abs() < 1e-4);
    }

    #[test]
    fn profile_rejects_short_interval() {
        let y = ts(&[1.0, 2.0, 3.0, 4.0]);
        assert!(contrast_pcws_lin(&y, iv(1, 3)).is_err());
        assert!(contrast_pcws_quad(&y, iv(1, 4)).is_err());
        assert!(contrast_mean_var(&y, iv(1, 4), DEFAULT_EPS).is_err());
    }

    #[test]
    fn max_agrees_with_profile() {
        let y: Vec<f64> = (0..60).map(|i| ((i * 37 % 11) as f64).sin() + (i / 20) as f64).collect();
        for sc in Scenario::ALL {
            let c = Contrast::new(sc);
            let p = c.profile(&y, iv(3, 58)).unwrap();
            let m = c.max(&y, iv(3, 58)).unwrap();
            assert_eq!((p.best_b, p.best_value), (m.b, m.value));
        }
    }

    proptest! {
        #[test]
        fn cusum_shift_invariant_and_scale_equivariant(
            y in prop::collection::vec(-10.0f64..10.0, 2..40),
            c in -100.0f64..100.0,
            k in -5.0f64..5.0,
        ) {
            let n = y.len();
            let base = contrast_pcws_const(&ts(&y), iv(1, n)).unwrap();
            let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
            let scaled: Vec<f64> = y.iter().map(|v| v * k).collect();
            let ps = contrast_pcws_const(&ts(&shifted), iv(1, n)).unwrap();
            let pk = contrast_pcws_const(&ts(&scaled), iv(1, n)).unwrap();
            for i in 0..base.values.len() {
                prop_assert!((base.values[i] - ps.values[i]).abs() < 1e-9 * (1.0 + c.abs()));
                prop_assert!((base.values[i] * k.abs() - pk.values[i]).abs() < 1e-9 * (1.0 + base.values[i]));
            }
        }

        #[test]
        fn ht_bounded_by_root_length(
            y in prop::collection::vec(-1e6f64..1e6, 2..60),
        ) {
            let n = y.len();
            let p = contrast_ht(&ts(&y), iv(1, n)).unwrap();
            prop_assert!(p.values.iter().all(|&v| v <= (n as f64).sqrt() + 1e-12));
        }

        #[test]
        fn profiles_are_nonnegative(
            y in prop::collection::vec(-50.0f64..50.0, 8..60),
            k in 0usize..6,
        ) {
            let n = y.len();
            let p = Contrast::new(Scenario::ALL[k]).profile(&y, iv(1, n)).unwrap();
            prop_assert!(p.values.iter().all(|&v| v >= 0.0 && v.is_finite()));
            prop_assert!(p.values.iter().all(|&v| v <= p.best_value));
            let first = p.values.iter().position(|&v| v == p.best_value).unwrap();
            prop_assert_eq!(p.first_b + first, p.best_b);
        }
    }
}
