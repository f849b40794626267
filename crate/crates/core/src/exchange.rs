//! Single-price call-auction exchange.
//!
//! The exchange keeps a client book (cash and shares per agent) and an order
//! book of limit orders. Once per session the matching engine intersects the
//! cumulative supply and demand curves, fills every order that crosses the
//! clearing price, and settles all fills at that one price.
//!
//! The intersection falls into one of three geometries:
//!
//! - **buy cross**: the demand curve is vertical at the clearing price, so
//!   the buy orders resting exactly at `P*` are rationed;
//! - **sell cross**: the mirror image, sell orders at `P*` are rationed;
//! - **mixed cross**: both sides have orders at `P*`; the larger side is
//!   rationed. An exact match is a mixed cross with `delta == 0`.
//!
//! Rationed orders at the marginal level are filled in order of arrival.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type OrderId = u64;
pub type ClientId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Buy,
    Sell,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Buy => f.write_str("buy"),
            Side::Sell => f.write_str("sell"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Order {
    pub id: OrderId,
    pub client_id: ClientId,
    pub side: Side,
    pub limit_price: f64,
    pub size: u64,
    pub remaining: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClientRecord {
    pub client_id: ClientId,
    pub cash: f64,
    pub shares: u64,
    pub open_order: Option<OrderId>,
}

impl ClientRecord {
    pub fn new(client_id: ClientId, cash: f64, shares: u64) -> Self {
        Self {
            client_id,
            cash,
            shares,
            open_order: None,
        }
    }

    /// Marked-to-market wealth at `price`.
    pub fn wealth(&self, price: f64) -> f64 {
        self.cash + self.shares as f64 * price
    }
}

/// Portfolio records of all clients, indexed by client id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClientBook {
    records: Vec<ClientRecord>,
}

impl ClientBook {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a client and returns its id (ids are dense, starting at zero).
    pub fn add(&mut self, cash: f64, shares: u64) -> ClientId {
        let id = self.records.len();
        self.records.push(ClientRecord::new(id, cash, shares));
        id
    }

    pub fn get(&self, id: ClientId) -> Option<&ClientRecord> {
        self.records.get(id)
    }

    pub fn get_mut(&mut self, id: ClientId) -> Option<&mut ClientRecord> {
        self.records.get_mut(id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ClientRecord> {
        self.records.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut ClientRecord> {
        self.records.iter_mut()
    }

    pub fn total_cash(&self) -> f64 {
        self.records.iter().map(|c| c.cash).sum()
    }

    pub fn total_shares(&self) -> u64 {
        self.records.iter().map(|c| c.shares).sum()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExchangeError {
    #[error("client {0} does not exist")]
    UnknownClient(ClientId),
    #[error("client {client} already has open order {order}")]
    OpenOrderExists { client: ClientId, order: OrderId },
    #[error("client {client} cannot afford {size} shares at {price} (cash {cash})")]
    InsufficientCash {
        client: ClientId,
        size: u64,
        price: f64,
        cash: f64,
    },
    #[error("client {client} cannot sell {size} shares (holds {held})")]
    InsufficientShares { client: ClientId, size: u64, held: u64 },
    #[error("invalid order: price {price}, size {size}")]
    InvalidPriceOrSize { price: f64, size: u64 },
}

type PriceKey = OrderedFloat<f64>;

/// Limit orders grouped by price level, FIFO within each level.
///
/// Bids are stored ascending like asks; iteration helpers present them in
/// priority order (highest bid first).
#[derive(Debug, Clone, Default)]
pub struct OrderBook {
    bids: BTreeMap<PriceKey, VecDeque<Order>>,
    asks: BTreeMap<PriceKey, VecDeque<Order>>,
}

impl OrderBook {
    pub fn new() -> Self {
        Self::default()
    }

    fn side_mut(&mut self, side: Side) -> &mut BTreeMap<PriceKey, VecDeque<Order>> {
        match side {
            Side::Buy => &mut self.bids,
            Side::Sell => &mut self.asks,
        }
    }

    fn insert(&mut self, order: Order) {
        self.side_mut(order.side)
            .entry(OrderedFloat(order.limit_price))
            .or_default()
            .push_back(order);
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty() && self.asks.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bids.values().chain(self.asks.values()).map(VecDeque::len).sum()
    }

    /// Buy levels, highest price first.
    pub fn bid_levels(&self) -> impl Iterator<Item = (f64, &VecDeque<Order>)> {
        self.bids.iter().rev().map(|(p, q)| (p.0, q))
    }

    /// Sell levels, lowest price first.
    pub fn ask_levels(&self) -> impl Iterator<Item = (f64, &VecDeque<Order>)> {
        self.asks.iter().map(|(p, q)| (p.0, q))
    }

    /// All buy orders in priority order (price descending, then arrival).
    pub fn bids(&self) -> impl Iterator<Item = &Order> {
        self.bid_levels().flat_map(|(_, q)| q.iter())
    }

    /// All sell orders in priority order (price ascending, then arrival).
    pub fn asks(&self) -> impl Iterator<Item = &Order> {
        self.ask_levels().flat_map(|(_, q)| q.iter())
    }

    pub fn best_bid(&self) -> Option<f64> {
        self.bids.keys().next_back().map(|p| p.0)
    }

    pub fn best_ask(&self) -> Option<f64> {
        self.asks.keys().next().map(|p| p.0)
    }

    /// Total remaining buy volume with limit at or above `price`.
    pub fn demand_at(&self, price: f64) -> u64 {
        self.bids
            .range(OrderedFloat(price)..)
            .flat_map(|(_, q)| q.iter())
            .map(|o| o.remaining)
            .sum()
    }

    /// Total remaining sell volume with limit at or below `price`.
    pub fn supply_at(&self, price: f64) -> u64 {
        self.asks
            .range(..=OrderedFloat(price))
            .flat_map(|(_, q)| q.iter())
            .map(|o| o.remaining)
            .sum()
    }

    /// One line per order, `order_id,side,price,remaining,client_id`, bids
    /// in priority order followed by asks in priority order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for o in self.bids().chain(self.asks()) {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                o.id, o.side, o.limit_price, o.remaining, o.client_id
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossType {
    BuyCross,
    SellCross,
    MixedCross,
}

impl CrossType {
    pub fn label(self) -> &'static str {
        match self {
            CrossType::BuyCross => "buy",
            CrossType::SellCross => "sell",
            CrossType::MixedCross => "mixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trade {
    pub buy_order: OrderId,
    pub sell_order: OrderId,
    pub quantity: u64,
    pub price: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cross {
    pub cross_type: CrossType,
    pub price: f64,
    pub volume: u64,
    /// Volume left unfilled at the marginal price level.
    pub delta: u64,
    pub trades: Vec<Trade>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClearingResult {
    NoCross,
    Cross(Cross),
}

impl ClearingResult {
    pub fn cross(&self) -> Option<&Cross> {
        match self {
            ClearingResult::NoCross => None,
            ClearingResult::Cross(c) => Some(c),
        }
    }

    pub fn price(&self) -> Option<f64> {
        self.cross().map(|c| c.price)
    }

    pub fn volume(&self) -> u64 {
        self.cross().map_or(0, |c| c.volume)
    }

    /// CSV row `t,cross_type,p_star,v_star,delta`; the price is empty when
    /// nothing crossed.
    pub fn csv_row(&self, t: u64) -> String {
        match self {
            ClearingResult::NoCross => format!("{t},none,,0,0"),
            ClearingResult::Cross(c) => format!(
                "{t},{},{},{},{}",
                c.cross_type.label(),
                crate::fmt_f64(c.price),
                c.volume,
                c.delta
            ),
        }
    }
}

/// Per-order filled quantity, in priority order, for each side.
fn allocate_fills<'a>(orders: impl Iterator<Item = &'a Order>, volume: u64) -> Vec<(OrderId, u64)> {
    let mut left = volume;
    let mut fills = Vec::new();
    for o in orders {
        if left == 0 {
            break;
        }
        let q = o.remaining.min(left);
        fills.push((o.id, q));
        left -= q;
    }
    fills
}

/// Pairs buy and sell fills in priority order into trades at `price`.
fn pair_fills(buys: &[(OrderId, u64)], sells: &[(OrderId, u64)], price: f64) -> Vec<Trade> {
    let mut trades = Vec::new();
    let (mut i, mut j) = (0, 0);
    let (mut buy_left, mut sell_left) = (
        buys.first().map_or(0, |f| f.1),
        sells.first().map_or(0, |f| f.1),
    );
    while i < buys.len() && j < sells.len() {
        let q = buy_left.min(sell_left);
        trades.push(Trade {
            buy_order: buys[i].0,
            sell_order: sells[j].0,
            quantity: q,
            price,
        });
        buy_left -= q;
        sell_left -= q;
        if buy_left == 0 {
            i += 1;
            buy_left = buys.get(i).map_or(0, |f| f.1);
        }
        if sell_left == 0 {
            j += 1;
            sell_left = sells.get(j).map_or(0, |f| f.1);
        }
    }
    trades
}

/// Order book plus client book plus the matching engine.
#[derive(Debug, Clone, Default)]
pub struct Exchange {
    pub clients: ClientBook,
    book: OrderBook,
    next_order_id: OrderId,
}

impl Exchange {
    pub fn new(clients: ClientBook) -> Self {
        Self {
            clients,
            book: OrderBook::new(),
            next_order_id: 1,
        }
    }

    pub fn book(&self) -> &OrderBook {
        &self.book
    }

    /// Validates and records a limit order. Order ids increase monotonically
    /// over the lifetime of the exchange and define arrival priority.
    pub fn submit_order(
        &mut self,
        client_id: ClientId,
        side: Side,
        limit_price: f64,
        size: u64,
    ) -> Result<OrderId, ExchangeError> {
        if !(limit_price > 0.0 && limit_price.is_finite()) || size == 0 {
            return Err(ExchangeError::InvalidPriceOrSize {
                price: limit_price,
                size,
            });
        }
        let client = self
            .clients
            .get(client_id)
            .ok_or(ExchangeError::UnknownClient(client_id))?;
        if let Some(order) = client.open_order {
            return Err(ExchangeError::OpenOrderExists {
                client: client_id,
                order,
            });
        }
        match side {
            Side::Buy if size as f64 * limit_price > client.cash => {
                return Err(ExchangeError::InsufficientCash {
                    client: client_id,
                    size,
                    price: limit_price,
                    cash: client.cash,
                });
            }
            Side::Sell if size > client.shares => {
                return Err(ExchangeError::InsufficientShares {
                    client: client_id,
                    size,
                    held: client.shares,
                });
            }
            _ => {}
        }

        let id = self.next_order_id;
        self.next_order_id += 1;
        self.book.insert(Order {
            id,
            client_id,
            side,
            limit_price,
            size,
            remaining: size,
        });
        self.clients.get_mut(client_id).expect("checked above").open_order = Some(id);
        Ok(id)
    }

    pub fn demand_at(&self, price: f64) -> u64 {
        self.book.demand_at(price)
    }

    pub fn supply_at(&self, price: f64) -> u64 {
        self.book.supply_at(price)
    }

    /// Locates the supply/demand intersection and plans the fills without
    /// touching the book.
    pub fn find_cross(&self) -> ClearingResult {
        let bids: Vec<(f64, u64)> = self
            .book
            .bid_levels()
            .map(|(p, q)| (p, q.iter().map(|o| o.remaining).sum()))
            .collect();
        let asks: Vec<(f64, u64)> = self
            .book
            .ask_levels()
            .map(|(p, q)| (p, q.iter().map(|o| o.remaining).sum()))
            .collect();
        if bids.is_empty() || asks.is_empty() || bids[0].0 < asks[0].0 {
            return ClearingResult::NoCross;
        }

        // Match the highest bid levels against the lowest ask levels while
        // they cross; the matched total is the maximal executable volume.
        let (mut i, mut j) = (0, 0);
        let (mut bid_left, mut ask_left) = (bids[0].1, asks[0].1);
        let mut volume = 0;
        let (mut last_bid, mut last_ask) = (0, 0);
        while i < bids.len() && j < asks.len() && bids[i].0 >= asks[j].0 {
            let q = bid_left.min(ask_left);
            volume += q;
            bid_left -= q;
            ask_left -= q;
            last_bid = i;
            last_ask = j;
            if bid_left == 0 {
                i += 1;
                bid_left = bids.get(i).map_or(0, |l| l.1);
            }
            if ask_left == 0 {
                j += 1;
                ask_left = asks.get(j).map_or(0, |l| l.1);
            }
        }

        let bid_rationed = i == last_bid;
        let ask_rationed = j == last_ask;
        let (cross_type, price, delta) = if bid_rationed {
            let p = bids[last_bid].0;
            let ty = if asks[last_ask].0 == p {
                CrossType::MixedCross
            } else {
                CrossType::BuyCross
            };
            (ty, p, bid_left)
        } else if ask_rationed {
            let p = asks[last_ask].0;
            let ty = if bids[last_bid].0 == p {
                CrossType::MixedCross
            } else {
                CrossType::SellCross
            };
            (ty, p, ask_left)
        } else {
            // Both marginal levels exhausted together: the curves coincide on
            // the interval [lo, hi] and every price in it clears the same set
            // of orders. Settle at its midpoint.
            let lo = match bids.get(i) {
                Some(&(p, _)) => p.max(asks[last_ask].0),
                None => asks[last_ask].0,
            };
            let hi = match asks.get(j) {
                Some(&(p, _)) => p.min(bids[last_bid].0),
                None => bids[last_bid].0,
            };
            let p = if lo == hi { lo } else { 0.5 * (lo + hi) };
            (CrossType::MixedCross, p, 0)
        };

        let buy_fills = allocate_fills(self.book.bids(), volume);
        let sell_fills = allocate_fills(self.book.asks(), volume);
        ClearingResult::Cross(Cross {
            cross_type,
            price,
            volume,
            delta,
            trades: pair_fills(&buy_fills, &sell_fills, price),
        })
    }

    /// Runs the auction: fills crossing orders, settles every fill at the
    /// clearing price, and removes fully filled orders from the book.
    pub fn clear(&mut self) -> ClearingResult {
        let result = self.find_cross();
        let Some(cross) = result.cross() else {
            return result;
        };

        let mut filled: BTreeMap<OrderId, u64> = BTreeMap::new();
        for t in &cross.trades {
            *filled.entry(t.buy_order).or_default() += t.quantity;
            *filled.entry(t.sell_order).or_default() += t.quantity;
        }
        let price = cross.price;
        for side in [Side::Buy, Side::Sell] {
            let levels = self.book.side_mut(side);
            levels.retain(|_, queue| {
                for order in queue.iter_mut() {
                    let Some(&q) = filled.get(&order.id) else {
                        continue;
                    };
                    order.remaining -= q;
                    let client = self
                        .clients
                        .get_mut(order.client_id)
                        .expect("orders belong to known clients");
                    let amount = q as f64 * price;
                    match side {
                        Side::Buy => {
                            client.cash -= amount;
                            client.shares += q;
                        }
                        Side::Sell => {
                            client.cash += amount;
                            client.shares -= q;
                        }
                    }
                    if order.remaining == 0 {
                        client.open_order = None;
                    }
                }
                queue.retain(|o| o.remaining > 0);
                !queue.is_empty()
            });
        }
        result
    }

    /// Drops every resting order and releases the clients' order slots.
    pub fn purge(&mut self) -> usize {
        let removed = self.book.len();
        self.book.bids.clear();
        self.book.asks.clear();
        for c in self.clients.iter_mut() {
            c.open_order = None;
        }
        removed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exchange_with(n: usize, cash: f64, shares: u64) -> Exchange {
        let mut clients = ClientBook::new();
        for _ in 0..n {
            clients.add(cash, shares);
        }
        Exchange::new(clients)
    }

    /// Submits (side, price, size) orders, one client per order.
    fn book(orders: &[(Side, f64, u64)]) -> Exchange {
        let mut ex = exchange_with(orders.len(), 1e9, 1_000_000);
        for (c, &(side, price, size)) in orders.iter().enumerate() {
            ex.submit_order(c, side, price, size).unwrap();
        }
        ex
    }

    #[test]
    fn affordability_boundary() {
        let mut ex = exchange_with(2, 1000.0, 0);
        assert!(ex.submit_order(0, Side::Buy, 10.0, 100).is_ok());
        assert!(matches!(
            ex.submit_order(1, Side::Buy, 10.0, 101),
            Err(ExchangeError::InsufficientCash { .. })
        ));
    }

    #[test]
    fn one_open_order_per_client() {
        let mut ex = exchange_with(1, 1000.0, 10);
        ex.submit_order(0, Side::Buy, 10.0, 1).unwrap();
        assert!(matches!(
            ex.submit_order(0, Side::Sell, 10.0, 1),
            Err(ExchangeError::OpenOrderExists { client: 0, .. })
        ));
    }

    #[test]
    fn rejects_bad_orders() {
        let mut ex = exchange_with(1, 1000.0, 10);
        assert!(matches!(
            ex.submit_order(0, Side::Sell, 10.0, 11),
            Err(ExchangeError::InsufficientShares { .. })
        ));
        assert!(matches!(
            ex.submit_order(0, Side::Sell, 0.0, 1),
            Err(ExchangeError::InvalidPriceOrSize { .. })
        ));
        assert!(matches!(
            ex.submit_order(0, Side::Sell, 1.0, 0),
            Err(ExchangeError::InvalidPriceOrSize { .. })
        ));
        assert!(matches!(
            ex.submit_order(3, Side::Sell, 1.0, 1),
            Err(ExchangeError::UnknownClient(3))
        ));
    }

    #[test]
    fn order_ids_increase() {
        let mut ex = exchange_with(3, 1000.0, 10);
        let a = ex.submit_order(0, Side::Buy, 1.0, 1).unwrap();
        ex.purge();
        let b = ex.submit_order(1, Side::Buy, 1.0, 1).unwrap();
        let c = ex.submit_order(2, Side::Sell, 1.0, 1).unwrap();
        assert!(a < b && b < c);
    }

    #[test]
    fn curves() {
        let ex = exchange_with(0, 0.0, 0);
        assert_eq!(ex.demand_at(1.0), 0);
        assert_eq!(ex.supply_at(1.0), 0);

        let ex = book(&[(Side::Buy, 102.0, 10), (Side::Sell, 99.0, 4), (Side::Sell, 100.0, 4)]);
        assert_eq!(ex.demand_at(102.0), 10);
        assert_eq!(ex.demand_at(102.01), 0);
        assert_eq!(ex.supply_at(100.0), 8);
        assert_eq!(ex.supply_at(99.5), 4);
    }

    #[test]
    fn no_cross_when_spread_open() {
        let mut ex = book(&[(Side::Buy, 95.0, 10), (Side::Sell, 100.0, 10)]);
        let before = ex.clients.clone();
        assert_eq!(ex.clear(), ClearingResult::NoCross);
        assert_eq!(ex.clients, before);
        assert_eq!(ex.book().len(), 2);
    }

    #[test]
    fn buy_cross_settles_at_uniform_price() {
        let mut ex = book(&[(Side::Buy, 102.0, 10), (Side::Sell, 99.0, 4), (Side::Sell, 100.0, 4)]);
        let res = ex.clear();
        let c = res.cross().unwrap();
        assert_eq!(c.cross_type, CrossType::BuyCross);
        assert_eq!((c.price, c.volume, c.delta), (102.0, 8, 2));
        assert_eq!(ex.clients.get(0).unwrap().cash, 1e9 - 8.0 * 102.0);
        assert_eq!(ex.clients.get(1).unwrap().cash, 1e9 + 4.0 * 102.0);
        assert_eq!(ex.clients.get(2).unwrap().cash, 1e9 + 4.0 * 102.0);
        let rest: Vec<_> = ex.book().bids().collect();
        assert_eq!(rest.len(), 1);
        assert_eq!((rest[0].limit_price, rest[0].remaining), (102.0, 2));
        assert_eq!(ex.clients.get(0).unwrap().open_order, Some(rest[0].id));
        assert_eq!(ex.clients.get(1).unwrap().open_order, None);
    }

    #[test]
    fn sell_cross_mirror() {
        let ex = book(&[(Side::Sell, 98.0, 10), (Side::Buy, 101.0, 4), (Side::Buy, 100.0, 4)]);
        let c = ex.find_cross();
        let c = c.cross().unwrap();
        assert_eq!(c.cross_type, CrossType::SellCross);
        assert_eq!((c.price, c.volume, c.delta), (98.0, 8, 2));
    }

    #[test]
    fn mixed_cross_rations_larger_side() {
        let ex = book(&[(Side::Buy, 100.0, 5), (Side::Sell, 100.0, 3)]);
        let res = ex.find_cross();
        let c = res.cross().unwrap();
        assert_eq!(c.cross_type, CrossType::MixedCross);
        assert_eq!((c.price, c.volume, c.delta), (100.0, 3, 2));
    }

    #[test]
    fn exact_plateau_settles_mid() {
        let ex = book(&[(Side::Buy, 102.0, 5), (Side::Sell, 99.0, 5)]);
        let res = ex.find_cross();
        let c = res.cross().unwrap();
        assert_eq!(c.cross_type, CrossType::MixedCross);
        assert_eq!((c.price, c.volume, c.delta), (100.5, 5, 0));
    }

    #[test]
    fn marginal_level_fills_by_arrival() {
        // Two buys at the marginal level 100 (3 shares each), 4 shares of supply.
        let mut ex = exchange_with(3, 1e6, 100);
        let first = ex.submit_order(0, Side::Buy, 100.0, 3).unwrap();
        let second = ex.submit_order(1, Side::Buy, 100.0, 3).unwrap();
        ex.submit_order(2, Side::Sell, 90.0, 4).unwrap();
        let res = ex.clear();
        let c = res.cross().unwrap();
        assert_eq!((c.volume, c.delta), (4, 2));
        let filled = |id| -> u64 {
            c.trades.iter().filter(|t| t.buy_order == id).map(|t| t.quantity).sum()
        };
        assert_eq!(filled(first), 3);
        assert_eq!(filled(second), 1);
        let left: Vec<_> = ex.book().bids().collect();
        assert_eq!((left[0].id, left[0].remaining), (second, 2));
    }

    #[test]
    fn purge_is_idempotent() {
        let mut ex = exchange_with(3, 1e6, 100);
        assert_eq!(ex.purge(), 0);
        ex.submit_order(0, Side::Buy, 1.0, 1).unwrap();
        ex.submit_order(1, Side::Buy, 2.0, 1).unwrap();
        ex.submit_order(2, Side::Sell, 5.0, 1).unwrap();
        assert_eq!(ex.purge(), 3);
        assert!(ex.book().is_empty());
        assert!(ex.clients.iter().all(|c| c.open_order.is_none()));
        assert_eq!(ex.purge(), 0);
    }

    #[test]
    fn dump_lists_orders_in_priority() {
        let ex = book(&[(Side::Buy, 101.0, 2), (Side::Buy, 102.0, 1), (Side::Sell, 103.0, 5)]);
        assert_eq!(ex.book().dump(), "2,buy,102,1,1\n1,buy,101,2,0\n3,sell,103,5,2\n");
    }

    #[test]
    fn csv_rows() {
        assert_eq!(ClearingResult::NoCross.csv_row(3), "3,none,,0,0");
        let ex = book(&[(Side::Buy, 102.0, 10), (Side::Sell, 99.0, 4), (Side::Sell, 100.0, 4)]);
        assert_eq!(
            ex.find_cross().csv_row(7),
            format!("7,buy,{},8,2", crate::fmt_f64(102.0))
        );
    }
}
