//! The simulation loop.
//!
//! Each step runs the same session:
//!
//! 1. interest and dividend accruals at the previous price;
//! 2. the breaking-news process advances;
//! 3. every agent, in ascending id, forms an intent and submits it;
//! 4. the call auction clears, and the print becomes the new price;
//! 5. the step is recorded and the order book is purged.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{form_intent, AgentProfile, SentimentSnapshot, TradeIntent};
use crate::analytics::{pareto_sample, pareto_tail_fit, ParetoFit, WealthSnapshot};
use crate::exchange::{ClientBook, CrossType, Exchange};
use crate::rng::{substream, Stream};
use crate::sentiment::{Gaussian, JumpVolatilitySpec, Regime, RegimeSchedule, VolatilityState};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid config: {field}: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// Distribution of each agent's initial portfolio value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Allocation {
    /// Gaussian around a common value with small spread.
    Identical { mu: f64, sd: f64 },
    Uniform { low: f64, high: f64 },
    /// Gaussian with large spread, clamped at zero.
    Normal { mu: f64, sd: f64 },
    Pareto { w0: f64, a: f64 },
}

impl Allocation {
    pub const IDENTICAL: Allocation = Allocation::Identical { mu: 2e6, sd: 1e3 };
    pub const UNIFORM: Allocation = Allocation::Uniform { low: 0.0, high: 1e6 };
    pub const NORMAL: Allocation = Allocation::Normal { mu: 1e6, sd: 3e5 };
    pub const PARETO: Allocation = Allocation::Pareto { w0: 1e5, a: 1.5 };

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Allocation::Identical { mu, sd } | Allocation::Normal { mu, sd } => {
                Gaussian::new(mu, sd).sample(rng).max(0.0)
            }
            Allocation::Uniform { low, high } => low + (high - low) * rng.random::<f64>(),
            Allocation::Pareto { w0, a } => pareto_sample(w0, a, rng),
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |r: &str| Err(ConfigError::new("allocation", r));
        match *self {
            Allocation::Identical { mu, sd } | Allocation::Normal { mu, sd } => {
                if !(mu.is_finite() && sd >= 0.0 && sd.is_finite()) {
                    return bad("gaussian needs finite mean and non-negative sd");
                }
            }
            Allocation::Uniform { low, high } => {
                if !(low >= 0.0 && high > low && high.is_finite()) {
                    return bad("uniform needs 0 <= low < high");
                }
            }
            Allocation::Pareto { w0, a } => {
                if !(w0 > 0.0 && a > 0.0 && w0.is_finite() && a.is_finite()) {
                    return bad("pareto needs w0 > 0 and a > 0");
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupConfig {
    pub size: usize,
    pub psi: RegimeSchedule,
}

fn default_stock_fraction() -> f64 {
    0.5
}

fn default_tail_fraction() -> f64 {
    0.25
}

fn default_initial_price() -> f64 {
    100.0
}

/// Full description of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub agents: usize,
    pub steps: u64,
    #[serde(default = "default_initial_price")]
    pub initial_price: f64,
    pub allocation: Allocation,
    #[serde(default = "default_stock_fraction")]
    pub stock_fraction: f64,
    pub interest: RegimeSchedule,
    pub dividend: RegimeSchedule,
    /// Inverse mean time between an agent's trades.
    pub participation: RegimeSchedule,
    pub groups: Vec<GroupConfig>,
    pub volatility: JumpVolatilitySpec,
    pub seed: u64,
    pub record_every: u64,
    #[serde(default = "default_tail_fraction")]
    pub tail_fraction: f64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.agents == 0 {
            return Err(ConfigError::new("agents", "population must not be empty"));
        }
        if !(self.initial_price > 0.0 && self.initial_price.is_finite()) {
            return Err(ConfigError::new("initial_price", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.stock_fraction) {
            return Err(ConfigError::new("stock_fraction", "must lie in [0, 1]"));
        }
        if self.record_every == 0 {
            return Err(ConfigError::new("record_every", "must be positive"));
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction <= 1.0) {
            return Err(ConfigError::new("tail_fraction", "must lie in (0, 1]"));
        }
        self.allocation.validate()?;
        if self.groups.is_empty() {
            return Err(ConfigError::new("groups", "at least one group is required"));
        }
        let total: usize = self.groups.iter().map(|g| g.size).sum();
        if total != self.agents {
            return Err(ConfigError::new(
                "groups",
                format!("group sizes sum to {total}, expected {}", self.agents),
            ));
        }
        let schedule = |field: &str, s: &RegimeSchedule| {
            s.validate(self.steps)
                .map_err(|e| ConfigError::new(field, e.to_string()))
        };
        schedule("interest", &self.interest)?;
        schedule("dividend", &self.dividend)?;
        schedule("participation", &self.participation)?;
        for (k, g) in self.groups.iter().enumerate() {
            schedule(&format!("groups[{k}].psi"), &g.psi)?;
        }
        self.volatility
            .validate()
            .map_err(|e| ConfigError::new("volatility", e.to_string()))
    }

    /// Same scenario over `steps` steps, with every schedule stretched to
    /// keep its regimes at the same relative times.
    pub fn with_steps(&self, steps: u64) -> Self {
        let old = self.steps;
        let rescale = |s: &RegimeSchedule| s.rescaled(old, steps);
        Self {
            steps,
            interest: rescale(&self.interest),
            dividend: rescale(&self.dividend),
            participation: rescale(&self.participation),
            groups: self
                .groups
                .iter()
                .map(|g| GroupConfig {
                    size: g.size,
                    psi: rescale(&g.psi),
                })
                .collect(),
            ..self.clone()
        }
    }

    /// Group index of every agent; groups occupy consecutive id ranges.
    pub fn group_of_agents(&self) -> Vec<usize> {
        self.groups
            .iter()
            .enumerate()
            .flat_map(|(g, cfg)| std::iter::repeat_n(g, cfg.size))
            .collect()
    }
}

/// Initial portfolios: each agent's wealth is split into stock (rounded to
/// whole shares at the initial price) and cash holding the remainder.
pub fn init_clients(config: &ScenarioConfig) -> Result<ClientBook, ConfigError> {
    if config.agents == 0 {
        return Err(ConfigError::new("agents", "population must not be empty"));
    }
    if !(config.initial_price > 0.0) {
        return Err(ConfigError::new("initial_price", "must be positive"));
    }
    let mut clients = ClientBook::new();
    for agent in 0..config.agents {
        let mut rng = substream(config.seed, Stream::Allocation, agent as u64, 0);
        let wealth = config.allocation.sample(&mut rng);
        let (cash, shares) = split_wealth(wealth, config.stock_fraction, config.initial_price);
        clients.add(cash, shares);
    }
    Ok(clients)
}

/// Splits `wealth` into `(cash, shares)` at `price`.
pub fn split_wealth(wealth: f64, stock_fraction: f64, price: f64) -> (f64, u64) {
    let shares = (stock_fraction * wealth / price).round_ties_even().max(0.0);
    let cash = (wealth - shares * price).max(0.0);
    (cash, shares as u64)
}

/// Pays interest on cash and dividends on stock valued at `price`.
pub fn apply_accruals(clients: &mut ClientBook, interest: f64, dividend: f64, price: f64) {
    for c in clients.iter_mut() {
        c.cash = (1.0 + interest) * c.cash + dividend * price * c.shares as f64;
    }
}

/// Price around which the market reverts: `(M / S) * exp(psi)`.
pub fn equilibrium_price(total_cash: f64, total_shares: u64, psi: f64) -> f64 {
    total_cash / total_shares as f64 * psi.exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: u64,
    pub price: f64,
    pub volume: u64,
    pub cross: Option<CrossType>,
    pub regime: Regime,
    pub interest: f64,
    pub dividend: f64,
    pub orders: usize,
    /// Total cash at the end of the step.
    pub total_cash: f64,
    pub total_shares: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimulationRecord {
    pub initial_price: f64,
    pub initial_cash: f64,
    pub initial_shares: u64,
    pub steps: Vec<StepRecord>,
    pub snapshots: Vec<WealthSnapshot>,
    pub pareto: Vec<(u64, ParetoFit)>,
    pub groups: Vec<usize>,
    pub n_groups: usize,
    pub final_wealth: Vec<f64>,
}

impl SimulationRecord {
    pub fn prices(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.price).collect()
    }

    /// Price path including the initial price.
    pub fn price_path(&self) -> Vec<f64> {
        std::iter::once(self.initial_price).chain(self.steps.iter().map(|s| s.price)).collect()
    }

    pub fn volumes(&self) -> Vec<u64> {
        self.steps.iter().map(|s| s.volume).collect()
    }

    pub fn breaking(&self) -> Vec<bool> {
        self.steps.iter().map(|s| s.regime == Regime::Breaking).collect()
    }

    /// Total cash after each step, preceded by the initial total.
    pub fn cash_path(&self) -> Vec<f64> {
        std::iter::once(self.initial_cash).chain(self.steps.iter().map(|s| s.total_cash)).collect()
    }
}

/// A running market.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: ScenarioConfig,
    exchange: Exchange,
    profiles: Vec<AgentProfile>,
    t: u64,
    last_price: f64,
    volatility: VolatilityState,
}

impl Simulation {
    pub fn new(config: ScenarioConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let clients = init_clients(&config)?;
        let profiles = config
            .group_of_agents()
            .into_iter()
            .enumerate()
            .map(|(agent_id, group_id)| AgentProfile { agent_id, group_id })
            .collect();
        Ok(Self {
            last_price: config.initial_price,
            exchange: Exchange::new(clients),
            profiles,
            t: 0,
            volatility: VolatilityState::default(),
            config,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn last_price(&self) -> f64 {
        self.last_price
    }

    pub fn clients(&self) -> &ClientBook {
        &self.exchange.clients
    }

    pub fn is_finished(&self) -> bool {
        self.t >= self.config.steps
    }

    pub fn wealth(&self) -> Vec<f64> {
        self.clients().iter().map(|c| c.wealth(self.last_price)).collect()
    }

    pub fn snapshot(&self, groups: &[usize]) -> WealthSnapshot {
        WealthSnapshot::new(self.t, self.last_price, self.wealth(), groups, self.config.groups.len())
    }

    fn sentiment_at(&self, t: u64, sigma: Gaussian) -> SentimentSnapshot {
        let at = |s: &RegimeSchedule| s.regime_value(t).expect("schedules validated against horizon");
        SentimentSnapshot {
            psi: self.config.groups.iter().map(|g| at(&g.psi)).collect(),
            sigma,
            participation: at(&self.config.participation),
        }
    }

    /// Runs one trading session. Panics if called past the horizon.
    pub fn step(&mut self) -> StepRecord {
        let t = self.t;
        assert!(t < self.config.steps, "step {t} beyond horizon");
        let seed = self.config.seed;
        let prev_price = self.last_price;

        let mut market_rng = substream(seed, Stream::Market, 0, t);
        let at = |s: &RegimeSchedule| s.regime_value(t).expect("schedules validated against horizon");
        let interest = at(&self.config.interest).sample(&mut market_rng).max(0.0);
        let dividend = at(&self.config.dividend).sample(&mut market_rng).max(0.0);
        apply_accruals(&mut self.exchange.clients, interest, dividend, prev_price);

        let mut vol_rng = substream(seed, Stream::Volatility, 0, t);
        let (state, sigma) = self.config.volatility.step(self.volatility, &mut vol_rng);
        self.volatility = state;
        let sentiment = self.sentiment_at(t, sigma);

        let mut orders = 0;
        for profile in &self.profiles {
            let mut rng = substream(seed, Stream::Agent, profile.agent_id as u64, t);
            let portfolio = self
                .exchange
                .clients
                .get(profile.agent_id)
                .expect("one client per agent");
            let intent = form_intent(profile, portfolio, prev_price, &sentiment, &mut rng);
            if let TradeIntent::Order {
                side,
                limit_price,
                size,
            } = intent
            {
                self.exchange
                    .submit_order(profile.agent_id, side, limit_price, size)
                    .expect("intents are feasible by construction");
                orders += 1;
            }
        }

        let result = self.exchange.clear();
        if let Some(p) = result.price() {
            self.last_price = p;
        }
        let record = StepRecord {
            t,
            price: self.last_price,
            volume: result.volume(),
            cross: result.cross().map(|c| c.cross_type),
            regime: state.regime,
            interest,
            dividend,
            orders,
            total_cash: self.exchange.clients.total_cash(),
            total_shares: self.exchange.clients.total_shares(),
        };
        self.exchange.purge();
        self.t += 1;
        record
    }

    /// Runs the remaining steps, recording wealth at the configured cadence.
    pub fn run(mut self) -> SimulationRecord {
        let groups = self.config.group_of_agents();
        let mut record = SimulationRecord {
            initial_price: self.last_price,
            initial_cash: self.clients().total_cash(),
            initial_shares: self.clients().total_shares(),
            groups: groups.clone(),
            n_groups: self.config.groups.len(),
            ..Default::default()
        };
        let every = self.config.record_every;
        let tail = self.config.tail_fraction;
        let observe = |sim: &Simulation, record: &mut SimulationRecord| {
            let snap = sim.snapshot(&groups);
            if let Ok(fit) = pareto_tail_fit(&snap.wealth, tail) {
                record.pareto.push((snap.t, fit));
            }
            record.snapshots.push(snap);
        };
        observe(&self, &mut record);
        while !self.is_finished() {
            let step = self.step();
            record.steps.push(step);
            if self.t.is_multiple_of(every) {
                observe(&self, &mut record);
            }
        }
        record.final_wealth = self.wealth();
        record
    }
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<SimulationRecord, ConfigError> {
    Ok(Simulation::new(config.clone())?.run())
}
