//! CSV outputs of a run and the offline `analyze` pass over them.
//!
//! A run directory holds:
//!
//! | file          | columns                                   |
//! |---------------|-------------------------------------------|
//! | `prices.csv`  | `t,price,volume,regime`                   |
//! | `wealth.csv`  | `t,group_id,total`                        |
//! | `pareto.csv`  | `t,a,r_squared,k`                         |
//! | `summary.csv` | one row, see [`SUMMARY_HEADER`]           |
//! | `agents.csv`  | `t,agent_id,wealth` (optional)            |
//!
//! `manifest.json` carries the config hash and timings. Floats are written
//! with 17 significant digits.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::analytics::{log_returns, normal_qq_fit, pareto_tail_fit, wealth_fraction, ParetoFit, QqFit};
use crate::fmt_f64;
use crate::scenario::config_hash;
use crate::sentiment::Regime;
use crate::simulation::{ScenarioConfig, SimulationRecord};

pub const SUMMARY_HEADER: &str = "scenario,seed,steps,qq_mean,qq_sd,qq_r_squared,final_a,final_a_r_squared,max_share_drift,max_cash_residual";

/// Shares of total wealth reported by `analyze`.
pub const WEALTH_FRACTIONS: [f64; 3] = [0.01, 0.05, 0.2];

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub scenario: String,
    pub config_hash: String,
    pub seed: u64,
    pub steps: u64,
    pub outputs: Vec<PathBuf>,
    pub elapsed_ms: u128,
}

/// Conservation diagnostics over a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conservation {
    /// Largest deviation of total shares from the initial count.
    pub max_share_drift: u64,
    /// Largest `|dM - (r M + d P S)| / M` over all steps.
    pub max_cash_residual: f64,
}

pub fn conservation(record: &SimulationRecord) -> Conservation {
    let prices = record.price_path();
    let cash = record.cash_path();
    let mut shares_prev = record.initial_shares;
    let mut out = Conservation {
        max_share_drift: 0,
        max_cash_residual: 0.0,
    };
    for (k, s) in record.steps.iter().enumerate() {
        let drift = s.total_shares.abs_diff(record.initial_shares);
        out.max_share_drift = out.max_share_drift.max(drift);
        let m_prev = cash[k];
        let expected = s.interest * m_prev + s.dividend * prices[k] * shares_prev as f64;
        let residual = ((cash[k + 1] - m_prev) - expected).abs() / m_prev;
        out.max_cash_residual = out.max_cash_residual.max(residual);
        shares_prev = s.total_shares;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub qq: Option<QqFit>,
    pub final_pareto: Option<ParetoFit>,
    pub conservation: Conservation,
}

pub fn summarize(record: &SimulationRecord) -> RunSummary {
    let qq = log_returns(&record.prices())
        .ok()
        .and_then(|r| normal_qq_fit(&r).ok());
    RunSummary {
        qq,
        final_pareto: record.pareto.last().map(|p| p.1),
        conservation: conservation(record),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn write_file(path: &Path, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> io::Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    body(&mut w)?;
    w.flush()
}

/// Writes the CSV outputs of `record` into `dir`, creating it if needed.
pub fn write_run(
    config: &ScenarioConfig,
    record: &SimulationRecord,
    dir: &Path,
    agent_wealth: bool,
    elapsed: Duration,
) -> io::Result<RunManifest> {
    fs::create_dir_all(dir)?;
    let mut outputs = Vec::new();

    let path = dir.join("prices.csv");
    write_file(&path, |w| {
        writeln!(w, "t,price,volume,regime")?;
        for s in &record.steps {
            let regime = match s.regime {
                Regime::Calm => "calm",
                Regime::Breaking => "breaking",
            };
            writeln!(w, "{},{},{},{}", s.t, fmt_f64(s.price), s.volume, regime)?;
        }
        Ok(())
    })?;
    outputs.push(path);

    let path = dir.join("wealth.csv");
    write_file(&path, |w| {
        writeln!(w, "t,group_id,total")?;
        for snap in &record.snapshots {
            for (g, total) in snap.group_totals.iter().enumerate() {
                writeln!(w, "{},{},{}", snap.t, g, fmt_f64(*total))?;
            }
        }
        Ok(())
    })?;
    outputs.push(path);

    let path = dir.join("pareto.csv");
    write_file(&path, |w| {
        writeln!(w, "t,a,r_squared,k")?;
        for (t, fit) in &record.pareto {
            writeln!(w, "{},{},{},{}", t, fmt_f64(fit.a), fmt_f64(fit.r_squared), fit.k)?;
        }
        Ok(())
    })?;
    outputs.push(path);

    let summary = summarize(record);
    let path = dir.join("summary.csv");
    write_file(&path, |w| {
        writeln!(w, "{SUMMARY_HEADER}")?;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            config.name,
            config.seed,
            config.steps,
            opt(summary.qq.map(|q| q.mean)),
            opt(summary.qq.map(|q| q.sd)),
            opt(summary.qq.map(|q| q.r_squared)),
            opt(summary.final_pareto.map(|p| p.a)),
            opt(summary.final_pareto.map(|p| p.r_squared)),
            summary.conservation.max_share_drift,
            fmt_f64(summary.conservation.max_cash_residual),
        )
    })?;
    outputs.push(path);

    if agent_wealth {
        let path = dir.join("agents.csv");
        write_file(&path, |w| {
            writeln!(w, "t,agent_id,wealth")?;
            for snap in &record.snapshots {
                for (i, wealth) in snap.wealth.iter().enumerate() {
                    writeln!(w, "{},{},{}", snap.t, i, fmt_f64(*wealth))?;
                }
            }
            Ok(())
        })?;
        outputs.push(path);
    }

    let manifest = RunManifest {
        scenario: config.name.clone(),
        config_hash: config_hash(config),
        seed: config.seed,
        steps: config.steps,
        outputs,
        elapsed_ms: elapsed.as_millis(),
    };
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    Ok(manifest)
}

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("missing input {0}")]
    MissingInput(PathBuf),
    #[error("malformed {path}: line {line}: {reason}")]
    MalformedCsv {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Rows of a CSV file after its header, split on commas.
struct Table {
    path: PathBuf,
    rows: Vec<(usize, Vec<String>)>,
}

impl Table {
    fn read(path: &Path, header: &str, required: bool) -> Result<Option<Table>, AnalyzeError> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return if required {
                    Err(AnalyzeError::MissingInput(path.to_path_buf()))
                } else {
                    Ok(None)
                };
            }
            Err(e) => return Err(e.into()),
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            None => return Err(AnalyzeError::MissingInput(path.to_path_buf())),
            Some((_, h)) if h.trim() != header => {
                return Err(AnalyzeError::MalformedCsv {
                    path: path.to_path_buf(),
                    line: 1,
                    reason: format!("expected header '{header}'"),
                })
            }
            Some(_) => {}
        }
        let width = header.split(',').count();
        let mut rows = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
            if fields.len() != width {
                return Err(AnalyzeError::MalformedCsv {
                    path: path.to_path_buf(),
                    line: i + 1,
                    reason: format!("expected {width} fields, found {}", fields.len()),
                });
            }
            rows.push((i + 1, fields));
        }
        Ok(Some(Table {
            path: path.to_path_buf(),
            rows,
        }))
    }

    fn parse<T: std::str::FromStr>(&self, line: usize, field: &str) -> Result<T, AnalyzeError> {
        field.parse().map_err(|_| AnalyzeError::MalformedCsv {
            path: self.path.clone(),
            line,
            reason: format!("cannot parse '{field}'"),
        })
    }
}

/// One `report.csv` row: `metric,key,value`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub metric: String,
    pub key: String,
    pub value: f64,
}

impl ReportRow {
    fn new(metric: &str, key: impl ToString, value: f64) -> Self {
        Self {
            metric: metric.to_string(),
            key: key.to_string(),
            value,
        }
    }
}

/// Share of total wealth held by the richest fraction `x` of `wealth`.
fn empirical_share(wealth: &[f64], x: f64) -> f64 {
    let mut sorted = wealth.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let top = ((x * sorted.len() as f64).round() as usize).max(1);
    let total: f64 = sorted.iter().sum();
    sorted[..top].iter().sum::<f64>() / total
}

/// Recomputes statistics from a run directory and writes `report.csv`.
///
/// Uses `prices.csv` for the return fit and `wealth.csv` for group totals.
/// The Pareto series is refit from `agents.csv` when present, otherwise
/// taken from `pareto.csv`.
pub fn analyze_dir(dir: &Path, tail_fraction: f64) -> Result<Vec<ReportRow>, AnalyzeError> {
    let prices = Table::read(&dir.join("prices.csv"), "t,price,volume,regime", true)?.expect("required");
    if prices.rows.is_empty() {
        return Err(AnalyzeError::MissingInput(prices.path));
    }
    let wealth = Table::read(&dir.join("wealth.csv"), "t,group_id,total", true)?.expect("required");
    let mut rows = Vec::new();

    let path: Vec<f64> = prices
        .rows
        .iter()
        .map(|(line, f)| prices.parse::<f64>(*line, &f[1]))
        .collect::<Result<_, _>>()?;
    let returns = log_returns(&path).map_err(|e| AnalyzeError::MalformedCsv {
        path: prices.path.clone(),
        line: 0,
        reason: e.to_string(),
    })?;
    if let Ok(qq) = normal_qq_fit(&returns) {
        rows.push(ReportRow::new("qq_mean", "", qq.mean));
        rows.push(ReportRow::new("qq_sd", "", qq.sd));
        rows.push(ReportRow::new("qq_r_squared", "", qq.r_squared));
    }
    rows.push(ReportRow::new("returns", "", returns.len() as f64));

    let mut last_t = None;
    let mut final_groups: Vec<(String, f64)> = Vec::new();
    for (line, f) in &wealth.rows {
        let t: u64 = wealth.parse(*line, &f[0])?;
        let total: f64 = wealth.parse(*line, &f[2])?;
        if last_t != Some(t) {
            final_groups.clear();
            last_t = Some(t);
        }
        final_groups.push((f[1].clone(), total));
    }
    for (g, total) in final_groups {
        rows.push(ReportRow::new("group_final_wealth", g, total));
    }

    let mut series: Vec<(u64, ParetoFit)> = Vec::new();
    let mut final_wealth: Option<Vec<f64>> = None;
    if let Some(agents) = Table::read(&dir.join("agents.csv"), "t,agent_id,wealth", false)? {
        let mut current: Option<(u64, Vec<f64>)> = None;
        let flush = |snap: (u64, Vec<f64>), series: &mut Vec<(u64, ParetoFit)>| {
            if let Ok(fit) = pareto_tail_fit(&snap.1, tail_fraction) {
                series.push((snap.0, fit));
            }
            snap.1
        };
        for (line, f) in &agents.rows {
            let t: u64 = agents.parse(*line, &f[0])?;
            let w: f64 = agents.parse(*line, &f[2])?;
            match &mut current {
                Some((ct, ws)) if *ct == t => ws.push(w),
                _ => {
                    if let Some(snap) = current.take() {
                        flush(snap, &mut series);
                    }
                    current = Some((t, vec![w]));
                }
            }
        }
        if let Some(snap) = current.take() {
            final_wealth = Some(flush(snap, &mut series));
        }
    } else if let Some(pareto) = Table::read(&dir.join("pareto.csv"), "t,a,r_squared,k", false)? {
        for (line, f) in &pareto.rows {
            series.push((
                pareto.parse(*line, &f[0])?,
                ParetoFit {
                    a: pareto.parse(*line, &f[1])?,
                    c: f64::NAN,
                    r_squared: pareto.parse(*line, &f[2])?,
                    k: pareto.parse(*line, &f[3])?,
                },
            ));
        }
    }
    for (t, fit) in &series {
        rows.push(ReportRow::new("pareto_a", t, fit.a));
    }
    if let Some((_, fit)) = series.last() {
        rows.push(ReportRow::new("pareto_r_squared_final", "", fit.r_squared));
        for x in WEALTH_FRACTIONS {
            let share = wealth_fraction(x, fit.a).unwrap_or(f64::NAN);
            rows.push(ReportRow::new("wealth_fraction_model", x, share));
        }
    }
    if let Some(ws) = final_wealth {
        for x in WEALTH_FRACTIONS {
            rows.push(ReportRow::new("wealth_fraction_empirical", x, empirical_share(&ws, x)));
        }
    }

    write_file(&dir.join("report.csv"), |w| {
        writeln!(w, "metric,key,value")?;
        for r in &rows {
            writeln!(w, "{},{},{}", r.metric, r.key, fmt_f64(r.value))?;
        }
        Ok(())
    })?;
    Ok(rows)
}
