//! Per-step trading decision of a single agent.
//!
//! An agent reads its group's sentiment, decides whether to trade at all,
//! picks a side, draws a limit price around the last print and a uniform
//! order size within its budget. Draws happen in that fixed order.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::exchange::{ClientId, ClientRecord, Side};
use crate::sentiment::{sample_agent_params, Gaussian};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgentProfile {
    pub agent_id: ClientId,
    pub group_id: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TradeIntent {
    None,
    Order {
        side: Side,
        limit_price: f64,
        size: u64,
    },
}

/// Sentiment distributions in force for one step.
#[derive(Debug, Clone, PartialEq)]
pub struct SentimentSnapshot {
    /// Buy/sell disbalance, one entry per group.
    pub psi: Vec<Gaussian>,
    pub sigma: Gaussian,
    pub participation: Gaussian,
}

/// Poisson participation: trades this step with probability `1 - exp(-x)`.
pub fn participates<R: Rng + ?Sized>(inv_rate: f64, rng: &mut R) -> bool {
    let p = -(-inv_rate).exp_m1();
    rng.random::<f64>() < p
}

/// Probability of buying given a disbalance `psi`, i.e. the logistic
/// normalisation of `p_buy / p_sell = exp(psi)`.
pub fn buy_probability(psi: f64) -> f64 {
    1.0 / (1.0 + (-psi).exp())
}

pub fn choose_side<R: Rng + ?Sized>(psi: f64, rng: &mut R) -> Side {
    if rng.random::<f64>() < buy_probability(psi) {
        Side::Buy
    } else {
        Side::Sell
    }
}

/// `|N(last, sigma * last)|`, redrawn on an exact zero.
pub fn draw_limit_price<R: Rng + ?Sized>(last_price: f64, sigma: f64, rng: &mut R) -> f64 {
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let p = (last_price + sigma * last_price * z).abs();
        if p > 0.0 {
            return p;
        }
    }
}

/// Largest whole number of shares `cash` buys at `price`.
pub fn affordable_shares(cash: f64, price: f64) -> u64 {
    let mut cap = (cash / price).floor().max(0.0) as u64;
    // floor of a rounded quotient may overshoot by one
    while cap > 0 && cap as f64 * price > cash {
        cap -= 1;
    }
    cap
}

/// Uniform order size on `[1, cap]`, where `cap` is the affordable share
/// count for buys and the holding for sells. `None` if `cap < 1`.
pub fn draw_size<R: Rng + ?Sized>(
    side: Side,
    cash: f64,
    shares: u64,
    limit_price: f64,
    rng: &mut R,
) -> Option<u64> {
    let cap = match side {
        Side::Buy => affordable_shares(cash, limit_price),
        Side::Sell => shares,
    };
    (cap >= 1).then(|| rng.random_range(1..=cap))
}

/// Runs the full decision pipeline for one agent in one step.
pub fn form_intent<R: Rng + ?Sized>(
    profile: &AgentProfile,
    portfolio: &ClientRecord,
    last_price: f64,
    snapshot: &SentimentSnapshot,
    rng: &mut R,
) -> TradeIntent {
    let params = sample_agent_params(
        &snapshot.psi[profile.group_id],
        &snapshot.sigma,
        &snapshot.participation,
        rng,
    );
    if !participates(params.inv_rate, rng) {
        return TradeIntent::None;
    }
    let side = choose_side(params.psi, rng);
    let limit_price = draw_limit_price(last_price, params.sigma, rng);
    match draw_size(side, portfolio.cash, portfolio.shares, limit_price, rng) {
        Some(size) => TradeIntent::Order {
            side,
            limit_price,
            size,
        },
        None => TradeIntent::None,
    }
}
