// SPDX-License-Identifier: MIT OR Apache-2.0

//! Dense contrast vectors on `{1, ..., T}`.
//!
//! These are built straight from their closed forms and are `O(T)` each, so
//! they serve as reference material: the fast contrast routines never touch
//! them, and tests compare the two.

use crate::error::{Error, Result};

/// The orthonormal vectors underlying the jump and kink contrasts on `[s, e]`
/// at split `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisVectors {
    /// Jump vector `ψ`.
    pub psi: Vec<f64>,
    /// Normalised indicator of `[s, e]`.
    pub one: Vec<f64>,
    /// Normalised centred linear trend on `[s, e]`.
    pub gamma: Vec<f64>,
    /// Kink vector `φ`.
    pub phi: Vec<f64>,
}

impl BasisVectors {
    /// Requires `1 <= s < s + 1 <= b <= e - 1 < e <= len`.
    pub fn new(len: usize, s: usize, e: usize, b: usize) -> Result<Self> {
        if !(s >= 1 && e <= len && s < b && b < e) {
            return Err(Error::InvalidParameter(format!(
                "basis needs 1 <= s < b < e <= T, got s={s}, b={b}, e={e}, T={len}"
            )));
        }
        Ok(Self {
            psi: psi_vector(len, s, e, b),
            one: one_vector(len, s, e),
            gamma: gamma_vector(len, s, e),
            phi: phi_vector(len, s, e, b),
        })
    }
}

/// `ψ` with `+sqrt((e-b)/(l(b-s+1)))` on `[s, b]` and
/// `-sqrt((b-s+1)/(l(e-b)))` on `[b+1, e]`. Zero when `b` is outside `[s, e-1]`.
pub fn psi_vector(len: usize, s: usize, e: usize, b: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    if !(s <= b && b < e && e <= len && s >= 1) {
        return v;
    }
    let l = (e - s + 1) as f64;
    let n1 = (b - s + 1) as f64;
    let n2 = (e - b) as f64;
    let left = (n2 / (l * n1)).sqrt();
    let right = -(n1 / (l * n2)).sqrt();
    for t in s..=e {
        v[t - 1] = if t <= b { left } else { right };
    }
    v
}

pub fn one_vector(len: usize, s: usize, e: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    let w = ((e - s + 1) as f64).powf(-0.5);
    for t in s..=e {
        v[t - 1] = w;
    }
    v
}

/// Centred linear vector on `[s, e]`; zero when `s == e`.
pub fn gamma_vector(len: usize, s: usize, e: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    if e <= s {
        return v;
    }
    let (sf, ef) = (s as f64, e as f64);
    let norm2 = (ef - sf + 1.0) * (ef * ef - 2.0 * ef * sf + 2.0 * ef + sf * sf - 2.0 * sf) / 12.0;
    let w = norm2.powf(-0.5);
    let mid = (ef + sf) / 2.0;
    for t in s..=e {
        v[t - 1] = w * (t as f64 - mid);
    }
    v
}

/// Kink vector, written exactly as its piecewise-linear closed form in
/// absolute time `t`. Zero when `b` is outside `[s+1, e-1]`.
pub fn phi_vector(len: usize, s: usize, e: usize, b: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    if !(s < b && b < e && e <= len && s >= 1) {
        return v;
    }
    let (sf, ef, bf) = (s as f64, e as f64, b as f64);
    let l = ef - sf + 1.0;
    let alpha = (6.0 / (l * (l * l - 1.0) * (1.0 + (ef - bf + 1.0) * (bf - sf + 1.0) + (ef - bf) * (bf - sf)))).sqrt();
    let beta = (((ef - bf + 1.0) * (ef - bf)) / ((bf - sf) * (bf - sf + 1.0))).sqrt();
    for t in s..=e {
        let tf = t as f64;
        v[t - 1] = if t <= b {
            alpha
                * beta
                * ((3.0 * (bf - sf + 1.0) + (ef - bf) - 1.0) * tf - (bf * (ef - sf) + 2.0 * sf * (bf - sf + 1.0)))
        } else {
            -(alpha / beta)
                * ((3.0 * (ef - bf) + (bf - sf + 1.0) + 1.0) * tf - (bf * (ef - sf) + 2.0 * ef * (ef - bf + 1.0)))
        };
    }
    v
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
