use proptest::prelude::*;
use sentimarket::report::{analyze_dir, conservation, write_run};
use sentimarket::scenario::{builtin_names, parse_config, serialize_config};
use sentimarket::{builtin, run_scenario, ScenarioConfig, Simulation};
use std::time::Duration;

fn shrunk(name: &str, agents: usize, steps: u64) -> ScenarioConfig {
    let mut c = builtin(name).unwrap().with_steps(steps);
    let per = agents / c.groups.len();
    for g in &mut c.groups {
        g.size = per;
    }
    c.agents = per * c.groups.len();
    c
}

#[test]
fn every_builtin_conserves_at_small_scale() {
    for name in builtin_names() {
        let rec = run_scenario(&shrunk(&name, 120, 200)).unwrap();
        let c = conservation(&rec);
        assert_eq!(c.max_share_drift, 0, "{name}");
        assert!(c.max_cash_residual < 1e-9, "{name}: {}", c.max_cash_residual);
    }
}

#[test]
fn stepping_matches_run() {
    let config = shrunk("sec5-normal", 80, 150);
    let mut sim = Simulation::new(config.clone()).unwrap();
    let stepped: Vec<f64> = (0..150).map(|_| sim.step().price).collect();
    assert!(sim.is_finished());
    assert_eq!(stepped, run_scenario(&config).unwrap().prices());
}

#[test]
fn seeds_change_the_path() {
    let a = shrunk("sec4-uniform", 100, 100);
    let b = ScenarioConfig { seed: 2, ..a.clone() };
    assert_ne!(run_scenario(&a).unwrap().prices(), run_scenario(&b).unwrap().prices());
}

#[test]
fn analyze_reads_back_a_run() {
    let config = shrunk("sec4-normal", 200, 400);
    let rec = run_scenario(&config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_run(&config, &rec, dir.path(), true, Duration::ZERO).unwrap();
    let rows = analyze_dir(dir.path(), config.tail_fraction).unwrap();
    let get = |m: &str| rows.iter().find(|r| r.metric == m).map(|r| r.value);
    // prices.csv holds the 400 post-session prices
    assert_eq!(get("returns"), Some(399.0));
    assert!(get("qq_r_squared").unwrap() > 0.9);
    assert!(rows.iter().filter(|r| r.metric == "wealth_fraction_empirical").count() == 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_seeds_conserve(seed in any::<u64>(), idx in 0usize..12) {
        let name = &builtin_names()[idx];
        let config = ScenarioConfig { seed, ..shrunk(name, 60, 80) };
        let rec = run_scenario(&config).unwrap();
        let c = conservation(&rec);
        prop_assert_eq!(c.max_share_drift, 0);
        prop_assert!(c.max_cash_residual < 1e-9);
        prop_assert!(rec.prices().iter().all(|p| *p > 0.0 && p.is_finite()));
        prop_assert!(rec.final_wealth.iter().all(|w| *w >= -1e-6));
    }

    #[test]
    fn config_round_trips(seed in any::<u64>(), idx in 0usize..12, steps in 10u64..5000) {
        let config = ScenarioConfig { seed, ..builtin(&builtin_names()[idx]).unwrap().with_steps(steps) };
        prop_assert_eq!(parse_config(&serialize_config(&config)).unwrap(), config);
    }
}
