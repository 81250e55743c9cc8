// SPDX-License-Identifier: MIT OR Apache-2.0

//! Benchmark signals and noise generators.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::stream_rng;
use crate::types::{ChangePointSet, Scenario};

/// Stream used by [`gen_noise`].
pub const NOISE_STREAM: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelId {
    Teeth,
    Blocks,
    Wave1,
    Wave2,
    Mix,
    Vol,
    Quad,
    Smile,
}

impl ModelId {
    pub const ALL: [ModelId; 8] = [
        ModelId::Teeth,
        ModelId::Blocks,
        ModelId::Wave1,
        ModelId::Wave2,
        ModelId::Mix,
        ModelId::Vol,
        ModelId::Quad,
        ModelId::Smile,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelId::Teeth => "teeth",
            ModelId::Blocks => "blocks",
            ModelId::Wave1 => "wave1",
            ModelId::Wave2 => "wave2",
            ModelId::Mix => "mix",
            ModelId::Vol => "vol",
            ModelId::Quad => "quad",
            ModelId::Smile => "smile",
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelId::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

/// A test signal with its true change-points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub model: ModelId,
    pub len: usize,
    pub f: Vec<f64>,
    pub sigma: Vec<f64>,
    pub true_cps: ChangePointSet,
    /// The scenario the signal belongs to (smile is only piecewise linear
    /// with jumps, and is used to test misspecification).
    pub scenario: Scenario,
}

/// Changes applied after a change-point `tau`: for `t > tau` the signal
/// gains `jump + slope·(t - tau) + quad·(t - tau)²`.
#[derive(Debug, Clone, Copy, Default)]
struct Change {
    jump: f64,
    slope: f64,
    quad: f64,
}

fn accumulate(len: usize, start: f64, slope: f64, taus: &[usize], changes: &[Change]) -> Vec<f64> {
    (1..=len)
        .map(|t| {
            let mut v = start + slope * (t - 1) as f64;
            for (&tau, c) in taus.iter().zip(changes) {
                if t > tau {
                    let u = (t - tau) as f64;
                    v += c.jump + c.slope * u + c.quad * u * u;
                }
            }
            v
        })
        .collect()
}

fn jumps(v: &[f64]) -> Vec<Change> {
    v.iter().map(|&jump| Change { jump, ..Change::default() }).collect()
}

fn kinks(v: &[f64]) -> Vec<Change> {
    v.iter().map(|&slope| Change { slope, ..Change::default() }).collect()
}

/// Builds the named test signal.
pub fn gen_signal(model: ModelId) -> SignalSpec {
    let every = |step: usize, n: usize| (1..=n).map(|k| k * step).collect::<Vec<_>>();
    let (len, taus, f, sigma, scenario) = match model {
        ModelId::Teeth => {
            let taus = every(64, 7);
            let sizes: Vec<f64> = (0..7).map(|k| if k % 2 == 0 { -2.0 } else { 2.0 }).collect();
            (512, taus.clone(), accumulate(512, 1.0, 0.0, &taus, &jumps(&sizes)), None, Scenario::PcwsConstMean)
        }
        ModelId::Blocks => {
            let taus = vec![205, 267, 308, 472, 512, 820, 902, 1332, 1557, 1598, 1659];
            let sizes = [1.464, -1.830, 1.098, -1.464, 1.830, -1.537, 0.768, 1.574, -1.135, 0.769, -1.537];
            (2024, taus.clone(), accumulate(2024, 0.0, 0.0, &taus, &jumps(&sizes)), None, Scenario::PcwsConstMean)
        }
        ModelId::Wave1 => {
            let taus = vec![256, 512, 768, 1024, 1152, 1280, 1344];
            let sizes: Vec<f64> = (1..=7).map(|k| if k % 2 == 1 { 1.0 } else { -1.0 } * k as f64 / 64.0).collect();
            let f = accumulate(1408, 1.0, 1.0 / 256.0, &taus, &kinks(&sizes));
            (1408, taus, f, None, Scenario::PcwsLinContMean)
        }
        ModelId::Wave2 => {
            let taus = every(150, 9);
            let sizes: Vec<f64> = (0..9).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / 32.0).collect();
            let f = accumulate(1500, 0.5, 1.0 / 64.0, &taus, &kinks(&sizes));
            (1500, taus, f, None, Scenario::PcwsLinContMean)
        }
        ModelId::Mix => {
            let taus = every(256, 7);
            let jump = [0.0, -1.0, 0.0, 0.0, 2.0, -1.0, 0.0];
            let slope = [1.0, -1.0, -1.0, 1.0, 0.0, 1.0, -2.0].map(|v| v / 64.0);
            let changes: Vec<Change> =
                jump.iter().zip(slope).map(|(&jump, slope)| Change { jump, slope, quad: 0.0 }).collect();
            (2048, taus.clone(), accumulate(2048, 0.0, 0.0, &taus, &changes), None, Scenario::PcwsLinMean)
        }
        ModelId::Vol => {
            let taus = every(256, 7);
            let f = accumulate(2048, 1.0, 0.0, &taus, &jumps(&[1.0, 0.0, -2.0, 0.0, 2.0, -1.0, 0.0]));
            let sigma = accumulate(2048, 1.0, 0.0, &taus, &jumps(&[0.0, 1.0, 0.0, 1.0, 0.0, -1.0, 1.0]));
            (2048, taus, f, Some(sigma), Scenario::PcwsConstMeanVar)
        }
        ModelId::Quad => {
            let taus = vec![100, 250, 500];
            let changes = [
                Change { jump: 2.0, slope: 0.0, quad: 0.0 },
                Change { jump: -2.0, slope: -0.1, quad: 0.0 },
                Change { jump: 0.0, slope: 0.1, quad: 2e-5 },
            ];
            (1000, taus.clone(), accumulate(1000, 0.0, 0.0, &taus, &changes), None, Scenario::PcwsQuadMean)
        }
        ModelId::Smile => {
            let taus = vec![256, 512, 768, 1280, 1536, 1792];
            let jump = [0.0, -4.0, 0.0, 0.0, 4.0, 0.0];
            let slope = [-2.0, 0.0, 1.0, 1.0, 0.0, -2.0].map(|v| v / 64.0);
            let changes: Vec<Change> =
                jump.iter().zip(slope).map(|(&jump, slope)| Change { jump, slope, quad: 0.0 }).collect();
            (2048, taus.clone(), accumulate(2048, 0.0, 1.0 / 64.0, &taus, &changes), None, Scenario::PcwsLinMean)
        }
    };
    SignalSpec {
        model,
        len,
        sigma: sigma.unwrap_or_else(|| vec![1.0; len]),
        f,
        true_cps: ChangePointSet::new(taus, len).expect("listed change-points are valid"),
        scenario,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseKind {
    /// `N(0, sd²)`.
    Gauss { sd: f64 },
    /// Laplace with scale `2^{-1/2}` (unit variance).
    Laplace,
    /// `sqrt(3/5)·t₅` (unit variance).
    T5,
    /// Stationary Gaussian AR(1) with coefficient 0.3 and unit variance.
    Ar1,
}

impl NoiseKind {
    /// Parses `gauss`, `laplace`, `t5` or `ar1`; `sd` applies to `gauss` only.
    pub fn parse(name: &str, sd: f64) -> Result<Self> {
        match name {
            "gauss" => {
                if !(sd.is_finite() && sd > 0.0) {
                    return Err(Error::InvalidSigma(sd));
                }
                Ok(NoiseKind::Gauss { sd })
            }
            "laplace" => Ok(NoiseKind::Laplace),
            "t5" => Ok(NoiseKind::T5),
            "ar1" => Ok(NoiseKind::Ar1),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Gauss { .. } => "gauss",
            NoiseKind::Laplace => "laplace",
            NoiseKind::T5 => "t5",
            NoiseKind::Ar1 => "ar1",
        }
    }

    /// Marginal variance of the generated noise.
    pub fn variance(self) -> f64 {
        match self {
            NoiseKind::Gauss { sd } => sd * sd,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub seed: u64,
}

const AR1_PHI: f64 = 0.3;

/// `len` noise draws, reproducible from `spec.seed`.
pub fn gen_noise(spec: NoiseSpec, len: usize) -> Vec<f64> {
    gen_noise_with(&mut stream_rng(spec.seed, NOISE_STREAM), spec.kind, len)
}

pub fn gen_noise_with<R: Rng>(rng: &mut R, kind: NoiseKind, len: usize) -> Vec<f64> {
    let normal = |rng: &mut R| -> f64 { rng.sample(StandardNormal) };
    match kind {
        NoiseKind::Gauss { sd } => (0..len).map(|_| sd * normal(rng)).collect(),
        NoiseKind::Laplace => {
            let scale = std::f64::consts::FRAC_1_SQRT_2;
            (0..len)
                .map(|_| {
                    let a: f64 = rng.sample(Exp1);
                    let b: f64 = rng.sample(Exp1);
                    scale * (a - b)
                })
                .collect()
        }
        NoiseKind::T5 => (0..len)
            .map(|_| {
                let z = normal(rng);
                let chi2: f64 = (0..5).map(|_| normal(rng).powi(2)).sum();
                (0.6f64).sqrt() * z / (chi2 / 5.0).sqrt()
            })
            .collect(),
        NoiseKind::Ar1 => {
            let innovation = (1.0 - AR1_PHI * AR1_PHI).sqrt();
            let mut out = Vec::with_capacity(len);
            let mut prev = normal(rng);
            if len > 0 {
                out.push(prev);
            }
            for _ in 1..len {
                prev = AR1_PHI * prev + innovation * normal(rng);
                out.push(prev);
            }
            out
        }
    }
}

/// Observations `f_t + σ_t ε_t`.
pub fn observe(signal: &SignalSpec, noise: &[f64]) -> Result<Vec<f64>> {
    if noise.len() != signal.len {
        return Err(Error::LengthMismatch { left: signal.len, right: noise.len() });
    }
    Ok(signal.f.iter().zip(&signal.sigma).zip(noise).map(|((f, s), e)| f + s * e).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitting::fit_segments;
    use crate::types::TimeSeries;

    #[test]
    fn teeth_values() {
        let s = gen_signal(ModelId::Teeth);
        assert_eq!(s.len, 512);
        assert_eq!(s.f[63], 1.0);
        assert_eq!(s.f[64], -1.0);
        assert_eq!(s.f[128], 1.0);
        assert_eq!(s.true_cps.taus(), &[64, 128, 192, 256, 320, 384, 448]);
    }

    #[test]
    fn wave1_values() {
        let s = gen_signal(ModelId::Wave1);
        assert_eq!(s.f[0], 1.0);
        assert!((s.f[1] - s.f[0] - 2f64.powi(-8)).abs() < 1e-15);
        let before = s.f[255] - s.f[254];
        let after = s.f[256] - s.f[255];
        assert!((after - before - 2f64.powi(-6)).abs() < 1e-12);
    }

    #[test]
    fn vol_sigma() {
        let s = gen_signal(ModelId::Vol);
        assert_eq!(s.sigma[0], 1.0);
        let at: Vec<f64> = s.true_cps.taus().iter().map(|&t| s.sigma[t] - s.sigma[t - 1]).collect();
        assert_eq!(at, vec![0.0, 1.0, 0.0, 1.0, 0.0, -1.0, 1.0]);
        assert_eq!(s.f[256] - s.f[255], 1.0);
    }

    #[test]
    fn quad_and_smile() {
        let q = gen_signal(ModelId::Quad);
        assert_eq!(&q.f[..3], &[0.0, 0.0, 0.0]);
        assert_eq!(q.f[100], 2.0);
        let s = gen_signal(ModelId::Smile);
        assert!((s.f[1] - 2f64.powi(-6)).abs() < 1e-15);
    }

    #[test]
    fn signals_lie_in_their_class() {
        for m in ModelId::ALL {
            let s = gen_signal(m);
            let y = TimeSeries::new(s.f.clone()).unwrap();
            let fit = fit_segments(&y, &s.true_cps, s.scenario).unwrap();
            let norm: f64 = s.f.iter().map(|v| v * v).sum();
            assert!(fit.rss <= 1e-16 * norm.max(1.0), "{m}: {}", fit.rss);
        }
    }

    #[test]
    fn names_round_trip() {
        for m in ModelId::ALL {
            assert_eq!(m.name().parse::<ModelId>().unwrap(), m);
        }
        assert!("noise".parse::<ModelId>().is_err());
    }

    fn moments(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        (mean, v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n)
    }

    #[test]
    fn noise_moments() {
        for kind in [NoiseKind::Gauss { sd: 2f64.sqrt() }, NoiseKind::Laplace, NoiseKind::T5, NoiseKind::Ar1] {
            let v = gen_noise(NoiseSpec { kind, seed: 77 }, 1_000_000);
            let (mean, var) = moments(&v);
            // AR(1) sums are less concentrated: sd of the mean is sqrt(1.3/0.7)/1000.
            assert!(mean.abs() < 0.005, "{kind:?}: mean {mean}");
            assert!((var - kind.variance()).abs() < 0.01 * kind.variance(), "{kind:?}: var {var}");
        }
    }

    #[test]
    fn ar1_lag_one_correlation() {
        let v = gen_noise(NoiseSpec { kind: NoiseKind::Ar1, seed: 5 }, 200_000);
        let r: f64 = v.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (v.len() - 1) as f64;
        assert!((r - 0.3).abs() < 0.01);
    }

    #[test]
    fn noise_reproducible() {
        let spec = NoiseSpec { kind: NoiseKind::T5, seed: 3 };
        assert_eq!(gen_noise(spec, 50), gen_noise(spec, 50));
        assert_ne!(gen_noise(spec, 50), gen_noise(NoiseSpec { seed: 4, ..spec }, 50));
    }
}
