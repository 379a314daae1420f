// SPDX-License-Identifier: Apache-2.0

//! Post-processing of evolved operators: renormalized correlation
//! profiles, mean-square displacement, diffusion-constant fits,
//! Pauli-weight spectra, and quench magnetization.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::pauli_sum::PauliSum;

/// Renormalized density-density correlations at one time:
/// `C_j = Tr[q_j q_c(t)] / Σ_k Tr[q_k q_c(t)]`, so `Σ_j C_j = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationProfile {
    pub time: f64,
    /// `values[j - 1]` is `C_j` for the 1-based chain coordinate `j`.
    pub values: Vec<f64>,
}

/// Least-squares line through `d²(t)` inside a window; the diffusion
/// constant is half the slope.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionFit {
    pub window: (f64, f64),
    pub slope: f64,
    pub intercept: f64,
    pub diffusion: f64,
    /// Root-mean-square residual of the windowed fit.
    pub residual: f64,
}

/// Correlation profile of the evolved density against a density per
/// chain coordinate. The denominator is the profile sum at the same
/// time, which restores `Σ_j C_j = 1` under non-unitary truncation.
pub fn correlation_profile(
    evolved: &PauliSum,
    densities: &[PauliSum],
    time: f64,
) -> Result<CorrelationProfile> {
    let mut raw = Vec::with_capacity(densities.len());
    for q in densities {
        raw.push(q.overlap(evolved)?.re);
    }
    let total: f64 = raw.iter().sum();
    if !(math::abs(total) > f64::MIN_POSITIVE) {
        return Err(Error::DegenerateProfile);
    }
    for v in &mut raw {
        *v /= total;
    }
    Ok(CorrelationProfile { time, values: raw })
}

/// Mean-square displacement `Σ_j C_j j² - (Σ_j C_j j)²` over the 1-based
/// chain coordinate.
pub fn msd(profile: &CorrelationProfile) -> f64 {
    let mut first = 0.0f64;
    let mut second = 0.0f64;
    for (idx, c) in profile.values.iter().enumerate() {
        let j = (idx + 1) as f64;
        first += c * j;
        second += c * j * j;
    }
    second - first * first
}

fn least_squares(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    let m = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let det = m * sxx - sx * sx;
    if det == 0.0 || !det.is_finite() {
        return Err(Error::DegenerateFit);
    }
    let slope = (m * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / m;
    let mut ss = 0.0f64;
    for (x, y) in points {
        let r = y - (slope * x + intercept);
        ss += r * r;
    }
    Ok((slope, intercept, math::sqrt(ss / m)))
}

/// Ordinary least squares on the `(t, d²)` samples with
/// `window.0 <= t <= window.1`; `D = slope / 2`.
pub fn diffusion_constant(samples: &[(f64, f64)], window: (f64, f64)) -> Result<DiffusionFit> {
    if !(window.0 < window.1) {
        return Err(Error::InvalidArgument("fit window must have t_lo < t_hi"));
    }
    let inside: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|(t, _)| *t >= window.0 && *t <= window.1)
        .collect();
    if inside.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: inside.len() });
    }
    let (slope, intercept, residual) = least_squares(&inside)?;
    Ok(DiffusionFit { window, slope, intercept, diffusion: slope / 2.0, residual })
}

/// Zero-threshold extrapolation: a line through the three smallest
/// abscissae of `(δ/Δt, D)` points, evaluated at zero.
pub fn extrapolate_zero_threshold(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: points.len() });
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("abscissae must be comparable"));
    let chosen = &sorted[..3];
    if chosen[0].0 == chosen[1].0 || chosen[1].0 == chosen[2].0 {
        return Err(Error::DegenerateFit);
    }
    let (_, intercept, _) = least_squares(chosen)?;
    Ok(intercept)
}

/// Rescales recorded weight spectra by the total weight of the first
/// record, `F(0)`.
pub fn weight_spectrum_series(
    spectra: &[(f64, BTreeMap<u32, f64>)],
) -> Result<Vec<(f64, BTreeMap<u32, f64>)>> {
    let Some((_, first)) = spectra.first() else {
        return Ok(Vec::new());
    };
    let f0: f64 = first.values().sum();
    if f0 <= 0.0 {
        return Err(Error::DegenerateProfile);
    }
    Ok(spectra
        .iter()
        .map(|(t, spec)| {
            (*t, spec.iter().map(|(&m, &f)| (m, f / f0)).collect())
        })
        .collect())
}

/// Quench magnetization `⟨0…0| O(t) |0…0⟩` of the evolved operator.
pub fn magnetization(evolved: &PauliSum) -> f64 {
    evolved.expectation_zero()
}
