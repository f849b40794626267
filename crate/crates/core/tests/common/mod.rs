//! Shared test support: random order books and a brute-force auction
//! oracle built directly from the aggregate supply and demand curves.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use sentimarket::exchange::{ClientBook, OrderId};
use sentimarket::{ClearingResult, CrossType, Exchange, Side};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spec {
    pub side: Side,
    pub price: f64,
    pub size: u64,
}

/// Up to `max_orders` orders. Grid books use integer prices in [95, 105] so
/// levels collide often; continuous books draw prices from [90, 110).
pub fn random_book<R: Rng>(rng: &mut R, max_orders: usize, grid: bool) -> Vec<Spec> {
    let n = rng.random_range(0..=max_orders);
    (0..n)
        .map(|_| Spec {
            side: if rng.random::<bool>() { Side::Buy } else { Side::Sell },
            price: if grid {
                rng.random_range(95..=105) as f64
            } else {
                rng.random_range(90.0..110.0)
            },
            size: rng.random_range(1..=20),
        })
        .collect()
}

/// One client per order, each rich enough for any order in `specs`.
pub fn exchange_for(specs: &[Spec]) -> (Exchange, Vec<OrderId>) {
    let mut clients = ClientBook::new();
    for _ in specs {
        clients.add(1e6, 1000);
    }
    let mut ex = Exchange::new(clients);
    let ids = specs
        .iter()
        .enumerate()
        .map(|(c, s)| ex.submit_order(c, s.side, s.price, s.size).unwrap())
        .collect();
    (ex, ids)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expected {
    pub cross_type: CrossType,
    pub price: f64,
    pub volume: u64,
    pub delta: u64,
    /// Fill of each order, in submission order.
    pub fills: Vec<u64>,
}

fn sum_where(specs: &[Spec], side: Side, keep: impl Fn(f64) -> bool) -> u64 {
    specs
        .iter()
        .filter(|s| s.side == side && keep(s.price))
        .map(|s| s.size)
        .sum()
}

/// Expected auction outcome, or `None` when nothing trades.
///
/// The volume is the largest `min(D(p), S(p))` over submitted prices. A
/// price clears it when both curves can be cut at that volume there; a
/// single such price is the print, several form a plateau settled at the
/// midpoint of its ends. Orders strictly better than the print fill fully,
/// orders at the print share the remainder in arrival order.
pub fn oracle(specs: &[Spec]) -> Option<Expected> {
    let d_ge = |p: f64| sum_where(specs, Side::Buy, |q| q >= p);
    let d_gt = |p: f64| sum_where(specs, Side::Buy, |q| q > p);
    let s_le = |p: f64| sum_where(specs, Side::Sell, |q| q <= p);
    let s_lt = |p: f64| sum_where(specs, Side::Sell, |q| q < p);

    let mut prices: Vec<f64> = specs.iter().map(|s| s.price).collect();
    prices.sort_by(f64::total_cmp);
    prices.dedup();

    let volume = prices.iter().map(|&p| d_ge(p).min(s_le(p))).max().unwrap_or(0);
    if volume == 0 {
        return None;
    }
    let clearing: Vec<f64> = prices
        .iter()
        .copied()
        .filter(|&p| d_ge(p) >= volume && volume >= d_gt(p) && s_le(p) >= volume && volume >= s_lt(p))
        .collect();
    assert!(!clearing.is_empty(), "oracle found no clearing price");

    let (cross_type, price, delta) = if let [p] = clearing[..] {
        let has_bid = specs.iter().any(|s| s.side == Side::Buy && s.price == p);
        let has_ask = specs.iter().any(|s| s.side == Side::Sell && s.price == p);
        let ty = match (has_bid, has_ask) {
            (true, true) => CrossType::MixedCross,
            (true, false) => CrossType::BuyCross,
            (false, true) => CrossType::SellCross,
            (false, false) => unreachable!("clearing prices are submitted prices"),
        };
        (ty, p, d_ge(p).abs_diff(s_le(p)))
    } else {
        let (lo, hi) = (clearing[0], clearing[clearing.len() - 1]);
        (CrossType::MixedCross, 0.5 * (lo + hi), 0)
    };

    let mut left_buy = volume - d_gt(price);
    let mut left_sell = volume - s_lt(price);
    let fills = specs
        .iter()
        .map(|s| match s.side {
            Side::Buy if s.price > price => s.size,
            Side::Sell if s.price < price => s.size,
            Side::Buy if s.price == price => {
                let q = s.size.min(left_buy);
                left_buy -= q;
                q
            }
            Side::Sell if s.price == price => {
                let q = s.size.min(left_sell);
                left_sell -= q;
                q
            }
            _ => 0,
        })
        .collect();
    Some(Expected {
        cross_type,
        price,
        volume,
        delta,
        fills,
    })
}

/// Per-order fill totals reported by the engine, in submission order.
pub fn engine_fills(result: &ClearingResult, ids: &[OrderId]) -> Vec<u64> {
    let mut by_id: BTreeMap<OrderId, u64> = BTreeMap::new();
    if let Some(c) = result.cross() {
        for t in &c.trades {
            *by_id.entry(t.buy_order).or_default() += t.quantity;
            *by_id.entry(t.sell_order).or_default() += t.quantity;
        }
    }
    ids.iter().map(|id| by_id.get(id).copied().unwrap_or(0)).collect()
}

/// Compares a clearing result with the oracle; `Err` describes the first
/// mismatch.
pub fn check_against_oracle(specs: &[Spec]) -> Result<(), String> {
    let (mut ex, ids) = exchange_for(specs);
    let result = ex.clear();
    let expected = oracle(specs);
    let Some(exp) = expected else {
        return match result {
            ClearingResult::NoCross => Ok(()),
            other => Err(format!("oracle: no cross, engine: {other:?}")),
        };
    };
    let Some(cross) = result.cross() else {
        return Err(format!("oracle: {exp:?}, engine: no cross"));
    };
    if cross.cross_type != exp.cross_type
        || cross.price != exp.price
        || cross.volume != exp.volume
        || cross.delta != exp.delta
    {
        return Err(format!(
            "oracle ({:?}, {}, {}, {}) engine ({:?}, {}, {}, {})",
            exp.cross_type, exp.price, exp.volume, exp.delta, cross.cross_type, cross.price, cross.volume, cross.delta
        ));
    }
    if cross.trades.iter().any(|t| t.price != exp.price) {
        return Err("trade away from the clearing price".into());
    }
    let fills = engine_fills(&result, &ids);
    if fills != exp.fills {
        return Err(format!("fills differ: oracle {:?} engine {fills:?}", exp.fills));
    }
    Ok(())
}
