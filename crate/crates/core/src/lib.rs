//! Sentiment-driven artificial stock market.
//!
//! Agents hold cash and shares of a single stock and trade through a
//! single-price call auction once per step. Whether an agent trades, which
//! side it takes and how far its limit price strays from the last print are
//! all drawn from externally given sentiment processes; agents never look
//! at past prices. The crate provides the exchange, the agents, the
//! simulation loop, built-in scenarios and the statistics used to study the
//! resulting prices and wealth distribution.
//!
//! ```no_run
//! use sentimarket::scenario::builtin;
//! use sentimarket::simulation::run_scenario;
//!
//! let config = builtin("sec5-identical").unwrap();
//! let record = run_scenario(&config).unwrap();
//! println!("final price {}", record.prices().last().unwrap());
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod analytics;
pub mod exchange;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod sentiment;
pub mod simulation;

pub use exchange::{ClearingResult, CrossType, Exchange, Side};
pub use scenario::{builtin, parse_config};
pub use simulation::{run_scenario, ScenarioConfig, Simulation, SimulationRecord};

/// Formats a float with 17 significant digits, enough to round-trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 100.0, 1.0 / 3.0, 2e6 + 0.25, -1e-300] {
            let s = super::fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }
}
