//! Command-line front end: run built-in or file scenarios, analyze run
//! directories, list the registry.
//!
//! Exit codes: 0 success, 1 bad input (config, unknown scenario, missing
//! files), 2 runtime failure (I/O, malformed CSV).

use std::collections::HashSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use sentimarket::report::{analyze_dir, write_run, AnalyzeError};
use sentimarket::scenario::{builtin_names, resolve, ScenarioError};
use sentimarket::{parse_config, ScenarioConfig, Simulation};

#[derive(Parser)]
#[command(name = "sentimarket", version, about = "Sentiment-driven call-auction market simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenarios and write CSV outputs.
    Run(RunArgs),
    /// Recompute statistics from a run directory into report.csv.
    Analyze(AnalyzeArgs),
    /// Print the names of the built-in scenarios.
    ListScenarios,
}

#[derive(Args)]
struct RunArgs {
    /// Built-in scenario name; repeat or comma-separate for a batch.
    #[arg(long, value_delimiter = ',')]
    scenario: Vec<String>,
    /// JSON scenario file; may be repeated.
    #[arg(long)]
    config: Vec<PathBuf>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the horizon; schedules keep their relative timing.
    #[arg(long)]
    steps: Option<u64>,
    /// Output directory. Batches write one subdirectory per scenario.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for batches (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Also write per-agent wealth snapshots to agents.csv.
    #[arg(long)]
    agent_wealth: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Run directory holding prices.csv and wealth.csv.
    dir: PathBuf,
    /// Share of richest agents used for tail refits.
    #[arg(long, default_value_t = 0.25)]
    tail_fraction: f64,
}

enum Failure {
    Input(String),
    Runtime(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (msg, code) = match self {
            Failure::Input(m) => (m, 1),
            Failure::Runtime(m) => (m, 2),
        };
        eprintln!("error: {msg}");
        ExitCode::from(code)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Analyze(args) => analyze(args),
        Command::ListScenarios => {
            let mut out = io::stdout().lock();
            // a closed pipe (e.g. `| head`) just ends the listing
            for name in builtin_names() {
                if writeln!(out, "{name}").is_err() {
                    break;
                }
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}

fn load_configs(args: &RunArgs) -> Result<Vec<ScenarioConfig>, Failure> {
    let input = |e: ScenarioError| Failure::Input(e.to_string());
    let mut configs = Vec::new();
    for name in &args.scenario {
        configs.push(resolve(name.trim()).map_err(input)?);
    }
    for path in &args.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let config = parse_config(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        configs.push(config);
    }
    if configs.is_empty() {
        return Err(Failure::Input("nothing to run: pass --scenario or --config".into()));
    }
    for c in &mut configs {
        if let Some(steps) = args.steps {
            *c = c.with_steps(steps);
        }
        if let Some(seed) = args.seed {
            c.seed = seed;
        }
        c.validate()
            .map_err(|e| Failure::Input(format!("{}: {e}", c.name)))?;
    }
    let mut seen = HashSet::new();
    if configs.len() > 1 {
        for c in &configs {
            if !seen.insert(c.name.clone()) {
                return Err(Failure::Input(format!("duplicate scenario name '{}' in batch", c.name)));
            }
        }
    }
    Ok(configs)
}

fn run_one(config: &ScenarioConfig, dir: &Path, agent_wealth: bool) -> Result<(), Failure> {
    let start = Instant::now();
    let sim = Simulation::new(config.clone()).map_err(|e| Failure::Input(e.to_string()))?;
    let record = sim.run();
    let manifest = write_run(config, &record, dir, agent_wealth, start.elapsed())
        .map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
    eprintln!(
        "{}: seed {} steps {} -> {} ({} ms)",
        manifest.scenario,
        manifest.seed,
        manifest.steps,
        dir.display(),
        manifest.elapsed_ms
    );
    Ok(())
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let configs = load_configs(&args)?;
    if let [config] = configs.as_slice() {
        return run_one(config, &args.out, args.agent_wealth);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    let results: Vec<Result<(), Failure>> = pool.install(|| {
        configs
            .par_iter()
            .map(|c| run_one(c, &args.out.join(&c.name), args.agent_wealth))
            .collect()
    });
    // report the first failure; input errors outrank runtime ones
    let mut failures: Vec<Failure> = results.into_iter().filter_map(Result::err).collect();
    failures.sort_by_key(|f| matches!(f, Failure::Runtime(_)));
    match failures.into_iter().next() {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    if !(args.tail_fraction > 0.0 && args.tail_fraction <= 1.0) {
        return Err(Failure::Input("--tail-fraction must lie in (0, 1]".into()));
    }
    match analyze_dir(&args.dir, args.tail_fraction) {
        Ok(rows) => {
            eprintln!("{} rows -> {}", rows.len(), args.dir.join("report.csv").display());
            Ok(())
        }
        Err(e @ AnalyzeError::MissingInput(_)) => Err(Failure::Input(e.to_string())),
        Err(e) => Err(Failure::Runtime(e.to_string())),
    }
}
