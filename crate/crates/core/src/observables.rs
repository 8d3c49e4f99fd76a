//! Scalar diagnostics: bipartite fluctuations, participation ratio, long-time
//! averages and log-log growth fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::StateVector;

/// Negative variances down to this size are rounding noise and clamp to zero.
const VARIANCE_FLOOR: f64 = -1e-14;

/// `F = sqrt(⟨(n1/N)²⟩ - ⟨n1/N⟩²)` from Fock-basis populations `p_l`,
/// `l = 0..=N`. Two-pass: mean first, then the centered second moment.
pub fn fluctuation_from_probabilities(probs: &[f64]) -> Result<f64> {
    let n = probs.len().saturating_sub(1);
    if n == 0 {
        return Ok(0.0);
    }
    let scale = 1.0 / n as f64;
    let total: f64 = probs.iter().sum();
    let mean = probs.iter().enumerate().map(|(l, p)| p * l as f64 * scale).sum::<f64>() / total;
    let variance = probs
        .iter()
        .enumerate()
        .map(|(l, p)| {
            let d = l as f64 * scale - mean;
            p * d * d
        })
        .sum::<f64>()
        / total;
    if variance < VARIANCE_FLOOR {
        return Err(Error::NegativeVariance { variance });
    }
    Ok(variance.max(0.0).sqrt())
}

/// `η = 1 / Σ_l p_l²`, with a compensated sum.
pub fn participation_from_probabilities(probs: &[f64]) -> f64 {
    1.0 / compensated_sum(probs.iter().map(|p| p * p))
}

/// Neumaier summation.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0_f64, 0.0_f64);
    for v in values {
        let t = sum + v;
        carry += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + carry
}

/// Bipartite fluctuations of the rescaled site-1 occupation `n1/N`. Lies in
/// `[0, 1/2]`.
pub fn bipartite_fluctuations(state: &StateVector) -> Result<f64> {
    fluctuation_from_probabilities(&state.probabilities())
}

/// Participation ratio on the Fock basis. Lies in `[1, D]`.
pub fn participation_ratio(state: &StateVector) -> f64 {
    participation_from_probabilities(&state.probabilities())
}

/// A real sequence sampled on consecutive kicks, `values[k]` at kick
/// `start + k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    label: String,
    start: usize,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(label: impl Into<String>, start: usize, values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self::from_values(label, start, values))
    }

    pub(crate) fn from_values(label: impl Into<String>, start: usize, values: Vec<f64>) -> Self {
        Self { label: label.into(), start, values }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Last kick covered, `None` when empty.
    pub fn end(&self) -> Option<usize> {
        (!self.values.is_empty()).then(|| self.start + self.values.len() - 1)
    }

    pub fn at(&self, kick: usize) -> Option<f64> {
        kick.checked_sub(self.start).and_then(|k| self.values.get(k).copied())
    }

    /// `a · self + b`, elementwise.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        Self { label: self.label.clone(), start: self.start, values: self.values.iter().map(|v| a * v + b).collect() }
    }

    fn slice(&self, lo: usize, hi: usize) -> Result<&[f64]> {
        let available = self.end().unwrap_or(0);
        if self.values.is_empty() || lo < self.start || hi > available {
            return Err(Error::SeriesTooShort { needed: hi, available });
        }
        Ok(&self.values[lo - self.start..=hi - self.start])
    }
}

/// Which kicks enter a long-time average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeAverage {
    /// Kicks `1..=𝒩`.
    #[default]
    ExcludeInitial,
    /// Kicks `0..=𝒩`.
    IncludeInitial,
}

/// Stroboscopic long-time average over the first `kicks` kicks.
pub fn long_time_average(ts: &TimeSeries, kicks: usize, mode: TimeAverage) -> Result<f64> {
    if kicks == 0 {
        return Err(Error::invalid("kicks", "must be at least 1"));
    }
    let lo = match mode {
        TimeAverage::ExcludeInitial => 1,
        TimeAverage::IncludeInitial => 0,
    };
    let window = ts.slice(lo, kicks)?;
    Ok(window.iter().sum::<f64>() / window.len() as f64)
}

/// Ordinary least squares fit of `ln F = exponent · ln n + ln prefactor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
}

/// Fits a power law to the series over kicks `n_lo..=n_hi`.
pub fn fit_growth_exponent(ts: &TimeSeries, n_lo: usize, n_hi: usize) -> Result<PowerLawFit> {
    if n_lo == 0 {
        return Err(Error::invalid("window", "n_lo must be at least 1 (log of 0)"));
    }
    if n_hi <= n_lo {
        return Err(Error::invalid("window", format!("need n_lo < n_hi, got [{n_lo}, {n_hi}]")));
    }
    let values = ts.slice(n_lo, n_hi)?;
    let mut xs = Vec::with_capacity(values.len());
    let mut ys = Vec::with_capacity(values.len());
    for (k, &v) in values.iter().enumerate() {
        if v <= 0.0 {
            return Err(Error::NonPositiveInWindow { kick: n_lo + k, value: v });
        }
        xs.push(((n_lo + k) as f64).ln());
        ys.push(v.ln());
    }
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - exponent * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - residual / syy } else { 1.0 };
    Ok(PowerLawFit { exponent, prefactor: intercept.exp(), r_squared })
}
