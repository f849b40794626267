//! Price and wealth statistics: log returns, normal QQ regression, Pareto
//! tail fits by rank regression, and the wealth-share law.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("non-positive price {value} at index {index}")]
    NonPositivePrice { index: usize, value: f64 },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("tail is degenerate: all tail values are equal")]
    DegenerateTail,
    #[error("non-positive wealth {0} in tail")]
    NonPositiveWealth(f64),
    #[error("Pareto exponent {0} must exceed 1")]
    ExponentOutOfRange(f64),
    #[error("tail fraction {0} outside (0, 1]")]
    TailFraction(f64),
}

/// Ordinary least squares of `y` on `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    /// Squared sample correlation of the pairs.
    pub r_squared: f64,
}

pub fn ols(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).min(1.0) };
    LineFit {
        intercept: my - slope * mx,
        slope,
        r_squared,
    }
}

pub fn log_returns(prices: &[f64]) -> Result<Vec<f64>, AnalyticsError> {
    if let Some((index, &value)) = prices.iter().enumerate().find(|(_, &p)| !(p > 0.0)) {
        return Err(AnalyticsError::NonPositivePrice { index, value });
    }
    Ok(prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QqFit {
    pub mean: f64,
    pub sd: f64,
    pub r_squared: f64,
}

/// Standard normal quantiles at the plotting positions `(i - 0.5) / n`.
pub fn normal_plotting_positions(n: usize) -> Vec<f64> {
    let std = Normal::standard();
    (1..=n)
        .map(|i| std.inverse_cdf((i as f64 - 0.5) / n as f64))
        .collect()
}

/// Regresses the sorted sample on standard normal quantiles. The intercept
/// estimates the mean, the slope the standard deviation.
pub fn normal_qq_fit(sample: &[f64]) -> Result<QqFit, AnalyticsError> {
    const MIN: usize = 10;
    if sample.len() < MIN {
        return Err(AnalyticsError::TooFewSamples {
            needed: MIN,
            got: sample.len(),
        });
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = normal_plotting_positions(sorted.len());
    let fit = ols(&q, &sorted);
    Ok(QqFit {
        mean: fit.intercept,
        sd: fit.slope.max(0.0),
        r_squared: fit.r_squared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoFit {
    /// Tail exponent.
    pub a: f64,
    /// Intercept of `log w` against `log rank`.
    pub c: f64,
    /// Number of tail samples used.
    pub k: usize,
    pub r_squared: f64,
}

/// Fits `log w = -(1/a) log rank + c` over the richest `tail_fraction` of
/// the population.
pub fn pareto_tail_fit(wealths: &[f64], tail_fraction: f64) -> Result<ParetoFit, AnalyticsError> {
    const MIN_SAMPLES: usize = 12;
    const MIN_TAIL: usize = 3;
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(AnalyticsError::TailFraction(tail_fraction));
    }
    if wealths.len() < MIN_SAMPLES {
        return Err(AnalyticsError::TooFewSamples {
            needed: MIN_SAMPLES,
            got: wealths.len(),
        });
    }
    let k = (tail_fraction * wealths.len() as f64).round() as usize;
    if k < MIN_TAIL {
        return Err(AnalyticsError::TooFewSamples {
            needed: MIN_TAIL,
            got: k,
        });
    }
    let mut sorted = wealths.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let tail = &sorted[..k];
    if let Some(&w) = tail.iter().find(|&&w| !(w > 0.0)) {
        return Err(AnalyticsError::NonPositiveWealth(w));
    }
    if tail[0] == tail[k - 1] {
        return Err(AnalyticsError::DegenerateTail);
    }
    let log_rank: Vec<f64> = (1..=k).map(|r| (r as f64).ln()).collect();
    let log_w: Vec<f64> = tail.iter().map(|w| w.ln()).collect();
    let fit = ols(&log_rank, &log_w);
    Ok(ParetoFit {
        a: -1.0 / fit.slope,
        c: fit.intercept,
        k,
        r_squared: fit.r_squared,
    })
}

/// Inverse-CDF draw from the Pareto law with minimum `w0` and exponent `a`.
pub fn pareto_sample<R: Rng + ?Sized>(w0: f64, a: f64, rng: &mut R) -> f64 {
    // 1 - U lies in (0, 1]
    let u = 1.0 - rng.random::<f64>();
    pareto_quantile(w0, a, u)
}

/// `w0 * u^(-1/a)`: the wealth exceeded with probability `u`.
pub fn pareto_quantile(w0: f64, a: f64, u: f64) -> f64 {
    w0 * u.powf(-1.0 / a)
}

/// Share of total wealth held by the richest fraction `x` of a Pareto
/// population with exponent `a`.
pub fn wealth_fraction(x: f64, a: f64) -> Result<f64, AnalyticsError> {
    if !(a > 1.0) {
        return Err(AnalyticsError::ExponentOutOfRange(a));
    }
    Ok(x.clamp(0.0, 1.0).powf((a - 1.0) / a))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WealthSnapshot {
    pub t: u64,
    pub price: f64,
    /// Per-agent `cash + shares * price`.
    pub wealth: Vec<f64>,
    pub group_totals: Vec<f64>,
}

impl WealthSnapshot {
    pub fn new(t: u64, price: f64, wealth: Vec<f64>, groups: &[usize], n_groups: usize) -> Self {
        let group_totals = group_wealth(&wealth, groups, n_groups);
        Self {
            t,
            price,
            wealth,
            group_totals,
        }
    }
}

/// Sums wealth per group; `groups[i]` is the group of agent `i`.
pub fn group_wealth(wealth: &[f64], groups: &[usize], n_groups: usize) -> Vec<f64> {
    let mut totals = vec![0.0; n_groups];
    for (w, &g) in wealth.iter().zip(groups) {
        totals[g] += w;
    }
    totals
}

/// Equal-width histogram over `[min, max]`; the maximum falls in the last bin.
pub fn histogram(values: &[f64], bins: usize) -> Vec<u64> {
    let bins = bins.max(1);
    let mut counts = vec![0; bins];
    if values.is_empty() {
        return counts;
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    for &v in values {
        let idx = if width > 0.0 {
            (((v - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[idx] += 1;
    }
    counts
}
