//! External sentiment processes.
//!
//! Buy/sell disbalance, dividend yield, interest and participation rate are
//! piecewise-constant gaussian schedules over simulation steps. Price
//! uncertainty follows a two-state jump process: calm most of the time,
//! breaking when news arrives.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest price uncertainty an agent may draw.
pub const MIN_SIGMA: f64 = 1e-6;

/// A gaussian `N(mu, sd)`. Sampling always consumes exactly one normal draw,
/// including when `sd == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub mu: f64,
    pub sd: f64,
}

impl Gaussian {
    pub const fn new(mu: f64, sd: f64) -> Self {
        Self { mu, sd }
    }

    pub const fn fixed(mu: f64) -> Self {
        Self { mu, sd: 0.0 }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        self.mu + self.sd * z
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SentimentError {
    #[error("step {0} is not covered by the schedule")]
    UncoveredTime(u64),
    #[error("schedule does not cover [0, {horizon}): {reason}")]
    Coverage { horizon: u64, reason: String },
    #[error("negative standard deviation {0}")]
    NegativeSd(f64),
    #[error("invalid volatility process: {0}")]
    Volatility(String),
}

/// One regime `[from, to)` of a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub from: u64,
    pub to: u64,
    pub mu: f64,
    pub sd: f64,
}

impl Segment {
    pub fn gaussian(&self) -> Gaussian {
        Gaussian::new(self.mu, self.sd)
    }
}

/// Piecewise-constant gaussian process over right-open step intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegimeSchedule {
    pub segments: Vec<Segment>,
}

impl RegimeSchedule {
    pub fn new(segments: Vec<Segment>) -> Self {
        Self { segments }
    }

    /// A single regime over `[0, horizon)`.
    pub fn constant(horizon: u64, mu: f64, sd: f64) -> Self {
        Self::new(vec![Segment {
            from: 0,
            to: horizon,
            mu,
            sd,
        }])
    }

    /// Builds a schedule from breakpoints given as fractions of the horizon,
    /// e.g. `[(0.0, 0.0, 0.01), (0.5, -0.3, 0.01)]`. Each regime runs until
    /// the next breakpoint; the last one until `horizon`.
    pub fn from_fractions(horizon: u64, regimes: &[(f64, f64, f64)]) -> Self {
        let start = |f: f64| (f * horizon as f64).round() as u64;
        let segments = regimes
            .iter()
            .enumerate()
            .map(|(k, &(frac, mu, sd))| Segment {
                from: start(frac),
                to: regimes.get(k + 1).map_or(horizon, |next| start(next.0)),
                mu,
                sd,
            })
            .filter(|s| s.from < s.to)
            .collect();
        Self::new(segments)
    }

    /// Checks that the segments partition `[0, horizon)` and that every sd is
    /// non-negative.
    pub fn validate(&self, horizon: u64) -> Result<(), SentimentError> {
        let coverage = |reason: String| SentimentError::Coverage { horizon, reason };
        let mut expected = 0;
        for s in &self.segments {
            if !(s.sd >= 0.0) {
                return Err(SentimentError::NegativeSd(s.sd));
            }
            if !s.mu.is_finite() {
                return Err(coverage(format!("non-finite mean in [{}, {})", s.from, s.to)));
            }
            if s.from != expected {
                return Err(coverage(if s.from > expected {
                    format!("gap [{expected}, {})", s.from)
                } else {
                    format!("overlap at step {}", s.from)
                }));
            }
            if s.to <= s.from {
                return Err(coverage(format!("empty segment [{}, {})", s.from, s.to)));
            }
            expected = s.to;
        }
        if expected != horizon {
            return Err(coverage(format!("ends at {expected}")));
        }
        Ok(())
    }

    /// The regime in force at step `t`. Boundaries belong to the later regime.
    pub fn regime_value(&self, t: u64) -> Result<Gaussian, SentimentError> {
        self.segments
            .iter()
            .find(|s| s.from <= t && t < s.to)
            .map(Segment::gaussian)
            .ok_or(SentimentError::UncoveredTime(t))
    }

    /// Stretches all boundaries from `old` to `new` horizon, keeping each
    /// regime's relative position.
    pub fn rescaled(&self, old: u64, new: u64) -> Self {
        let map = |t: u64| {
            if old == 0 {
                0
            } else {
                ((t as f64) * new as f64 / old as f64).round() as u64
            }
        };
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                from: map(s.from),
                to: map(s.to),
                ..*s
            })
            .filter(|s| s.from < s.to)
            .collect();
        Self::new(segments)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Calm,
    Breaking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VolatilityState {
    pub regime: Regime,
    pub steps_left: u32,
}

impl Default for VolatilityState {
    fn default() -> Self {
        Self {
            regime: Regime::Calm,
            steps_left: 0,
        }
    }
}

fn default_duration() -> u32 {
    1
}

/// Jump-volatility process: calm and breaking uncertainty levels, and the
/// per-step inverse mean arrival time of breaking news.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpVolatilitySpec {
    pub calm: Gaussian,
    pub breaking: Gaussian,
    pub inv_rate: Gaussian,
    /// Steps a breaking regime lasts after each arrival.
    #[serde(default = "default_duration")]
    pub duration: u32,
}

impl JumpVolatilitySpec {
    /// Uncertainty that never jumps.
    pub fn calm_only(calm: Gaussian) -> Self {
        Self {
            calm,
            breaking: calm,
            inv_rate: Gaussian::fixed(0.0),
            duration: 1,
        }
    }

    pub fn validate(&self) -> Result<(), SentimentError> {
        let bad = |m: &str| Err(SentimentError::Volatility(m.to_string()));
        if !(self.calm.mu > 0.0) {
            return bad("calm mean must be positive");
        }
        if !(self.breaking.mu >= self.calm.mu) {
            return bad("breaking mean must not be below calm mean");
        }
        if !(self.inv_rate.mu >= 0.0) {
            return bad("arrival rate must be non-negative");
        }
        for g in [self.calm, self.breaking, self.inv_rate] {
            if !(g.sd >= 0.0) {
                return Err(SentimentError::NegativeSd(g.sd));
            }
        }
        if self.duration == 0 {
            return bad("breaking duration must be at least one step");
        }
        Ok(())
    }

    /// Advances the news process by one step and returns the new state with
    /// the uncertainty distribution agents draw from during that step.
    pub fn step<R: Rng + ?Sized>(
        &self,
        state: VolatilityState,
        rng: &mut R,
    ) -> (VolatilityState, Gaussian) {
        let rate = self.inv_rate.sample(rng).max(0.0);
        let arrival_prob = -(-rate).exp_m1();
        let arrived = rng.random::<f64>() < arrival_prob;
        let next = if arrived {
            VolatilityState {
                regime: Regime::Breaking,
                steps_left: self.duration,
            }
        } else {
            match state.steps_left.saturating_sub(1) {
                0 => VolatilityState::default(),
                left => VolatilityState {
                    regime: Regime::Breaking,
                    steps_left: left,
                },
            }
        };
        let active = match next.regime {
            Regime::Calm => self.calm,
            Regime::Breaking => self.breaking,
        };
        (next, active)
    }
}

/// Per-agent behavioural parameters for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentParams {
    /// Buy/sell disbalance: `p_buy / p_sell = exp(psi)`.
    pub psi: f64,
    /// Relative limit-price uncertainty.
    pub sigma: f64,
    /// Inverse mean time between trades, per step.
    pub inv_rate: f64,
}

/// Draws one agent's parameters around the common sentiment values.
pub fn sample_agent_params<R: Rng + ?Sized>(
    psi: &Gaussian,
    sigma: &Gaussian,
    inv_rate: &Gaussian,
    rng: &mut R,
) -> AgentParams {
    let psi = psi.sample(rng);
    let sigma = sigma.sample(rng).max(MIN_SIGMA);
    let inv_rate = inv_rate.sample(rng).max(0.0);
    AgentParams {
        psi,
        sigma,
        inv_rate,
    }
}
