//! Scenario configuration files and the built-in scenario registry.
//!
//! Config files are JSON documents mirroring [`ScenarioConfig`]:
//!
//! ```json
//! {
//!   "name": "custom",
//!   "agents": 1000,
//!   "steps": 1000,
//!   "initial_price": 100.0,
//!   "allocation": { "kind": "identical", "mu": 2000000.0, "sd": 1000.0 },
//!   "stock_fraction": 0.5,
//!   "interest": [ { "from": 0, "to": 1000, "mu": 0.001, "sd": 0.0 } ],
//!   "dividend": [ { "from": 0, "to": 1000, "mu": 0.0, "sd": 0.0 } ],
//!   "participation": [ { "from": 0, "to": 1000, "mu": 0.3, "sd": 0.01 } ],
//!   "groups": [ { "size": 1000, "psi": [
//!       { "from": 0, "to": 500, "mu": 0.0, "sd": 0.01 },
//!       { "from": 500, "to": 1000, "mu": -0.3, "sd": 0.01 } ] } ],
//!   "volatility": {
//!     "calm": { "mu": 0.05, "sd": 0.001 },
//!     "breaking": { "mu": 0.2, "sd": 0.001 },
//!     "inv_rate": { "mu": 0.08, "sd": 0.0001 },
//!     "duration": 1
//!   },
//!   "seed": 1,
//!   "record_every": 25,
//!   "tail_fraction": 0.25
//! }
//! ```
//!
//! `initial_price`, `stock_fraction`, `tail_fraction` and
//! `volatility.duration` may be omitted (defaults 100, 0.5, 0.25, 1).

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::sentiment::{Gaussian, JumpVolatilitySpec, RegimeSchedule};
use crate::simulation::{Allocation, ConfigError, GroupConfig, ScenarioConfig};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Validation(#[from] ConfigError),
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let config: ScenarioConfig = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

pub fn serialize_config(config: &ScenarioConfig) -> String {
    serde_json::to_string_pretty(config).expect("config serializes")
}

/// Hex SHA-256 of the compact JSON form of the config.
pub fn config_hash(config: &ScenarioConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    Sha256::digest(canonical.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub const ALLOCATIONS: [(&str, Allocation); 4] = [
    ("identical", Allocation::IDENTICAL),
    ("uniform", Allocation::UNIFORM),
    ("normal", Allocation::NORMAL),
    ("pareto", Allocation::PARETO),
];

pub const CALM: Gaussian = Gaussian::new(0.05, 0.001);
pub const BREAKING: Gaussian = Gaussian::new(0.2, 0.001);

/// Names of all built-in scenarios.
pub fn builtin_names() -> Vec<String> {
    ["sec4", "sec5", "sec6"]
        .iter()
        .flat_map(|s| ALLOCATIONS.iter().map(move |(a, _)| format!("{s}-{a}")))
        .collect()
}

/// Closed market: no interest, no dividends, neutral sentiment and calm
/// uncertainty, 10% participation.
fn participation_only(steps: u64) -> ScenarioConfig {
    ScenarioConfig {
        name: String::new(),
        agents: 1000,
        steps,
        initial_price: 100.0,
        allocation: Allocation::IDENTICAL,
        stock_fraction: 0.5,
        interest: RegimeSchedule::constant(steps, 0.0, 0.0),
        dividend: RegimeSchedule::constant(steps, 0.0, 0.0),
        participation: RegimeSchedule::constant(steps, 0.1, 0.01),
        groups: vec![GroupConfig {
            size: 1000,
            psi: RegimeSchedule::constant(steps, 0.0, 0.0),
        }],
        volatility: JumpVolatilitySpec::calm_only(CALM),
        seed: 1,
        record_every: 50,
        tail_fraction: 0.25,
    }
}

/// Interest-bearing market with jump volatility and a sell sentiment from
/// mid-run.
fn sell_shift(steps: u64) -> ScenarioConfig {
    ScenarioConfig {
        interest: RegimeSchedule::constant(steps, 1e-3, 0.0),
        participation: RegimeSchedule::constant(steps, 0.3, 0.01),
        groups: vec![GroupConfig {
            size: 1000,
            psi: RegimeSchedule::from_fractions(steps, &[(0.0, 0.0, 0.01), (0.5, -0.3, 0.01)]),
        }],
        volatility: JumpVolatilitySpec {
            calm: CALM,
            breaking: BREAKING,
            inv_rate: Gaussian::new(0.08, 1e-4),
            duration: 1,
        },
        record_every: 25,
        ..participation_only(steps)
    }
}

/// Four groups of 250 with diverging buy/sell sentiments, dividends until
/// three quarters of the run.
fn four_groups(steps: u64) -> ScenarioConfig {
    let sd = 0.1;
    let psi = [
        vec![(0.0, 0.0, sd), (0.25, -1.0, sd), (0.5, 0.0, sd), (0.75, -1.0, sd)],
        vec![(0.0, 0.0, sd), (0.5, 0.1, sd), (0.75, 0.0, sd)],
        vec![(0.0, 0.0, sd), (0.75, 1.0, sd)],
        vec![(0.0, 0.0, sd)],
    ];
    ScenarioConfig {
        interest: RegimeSchedule::constant(steps, 5e-4, 0.0),
        dividend: RegimeSchedule::from_fractions(steps, &[(0.0, 1e-3, 2e-4), (0.75, 0.0, 0.0)]),
        participation: RegimeSchedule::constant(steps, 0.6, 0.01),
        groups: psi
            .iter()
            .map(|p| GroupConfig {
                size: 250,
                psi: RegimeSchedule::from_fractions(steps, p),
            })
            .collect(),
        volatility: JumpVolatilitySpec {
            calm: CALM,
            breaking: BREAKING,
            inv_rate: Gaussian::new(0.005, 1e-4),
            duration: 1,
        },
        record_every: 25,
        ..participation_only(steps)
    }
}

/// Looks up a built-in scenario such as `sec5-pareto`.
pub fn builtin(name: &str) -> Option<ScenarioConfig> {
    let (family, alloc) = name.split_once('-')?;
    let allocation = ALLOCATIONS.iter().find(|(a, _)| *a == alloc)?.1;
    let base = match family {
        "sec4" => participation_only(100_000),
        "sec5" => sell_shift(1000),
        "sec6" => four_groups(1000),
        _ => return None,
    };
    Some(ScenarioConfig {
        name: name.to_string(),
        allocation,
        ..base
    })
}

pub fn resolve(name: &str) -> Result<ScenarioConfig, ScenarioError> {
    builtin(name).ok_or_else(|| ScenarioError::UnknownScenario(name.to_string()))
}
